// Copyright 2026 The visemes Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "visemes/p2vmap.hpp"

namespace visemes {

struct MatchCell {
  std::size_t class_a = 0;  // index into a.classes()
  std::size_t class_b = 0;
  double weight = 0.0;
};

struct SimilarityReport {
  double score = 0.0;  // |U - L| / N_p
  double upper = 0.0;  // U: cells with class_a < class_b
  double lower = 0.0;  // L: cells with class_a > class_b
  std::size_t matched_phonemes = 0;
  std::vector<MatchCell> match_table;  // non-zero cells, row-major
};

/// Similarity between two maps; 0 means identical. Each phoneme weighs
/// 1/|class| in each map; a shared phoneme adds both weights to the cell
/// (its class in a, its class in b). Only ordinary classes take part.
/// Throws InputError when no phoneme is shared.
SimilarityReport similarity(const P2VMap& a, const P2VMap& b);

/// Pairwise scores, row i column j = similarity(maps[i], maps[j]).score.
std::vector<std::vector<double>> similarity_matrix(const std::vector<P2VMap>& maps);

void write_similarity_csv(std::ostream& out, const std::vector<P2VMap>& maps,
                          const std::vector<std::vector<double>>& scores, const std::string& provenance = {});

}  // namespace visemes
