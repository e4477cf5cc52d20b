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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace visemes {

enum class EditOp { match, substitution, insertion, deletion };

struct AlignedPair {
  EditOp op;
  std::string ref;  // empty for insertions
  std::string hyp;  // empty for deletions
};

/// Minimum-cost alignment of a hypothesis against a reference.
struct Alignment {
  std::vector<AlignedPair> ops;
  std::size_t n = 0;  // reference length
  std::size_t deletions = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t matches() const { return n - deletions - substitutions; }
};

/// Unit costs by default. HTK's HResults weights are sub=10, ins=del=7.
struct EditCosts {
  int substitution = 1;
  int insertion = 1;
  int deletion = 1;
};

/// Dynamic-programming alignment. On equal cost the traceback prefers
/// match, then substitution, then deletion, then insertion.
Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp, EditCosts costs = {});

/// Sums counts over several alignments (ops are concatenated).
Alignment merge(std::span<const Alignment> alignments);

/// C = (N - D - S) / N. Throws InputError when N = 0.
double correctness(const Alignment& a);
/// A = (N - D - S - I) / N. Throws InputError when N = 0. May be negative.
double accuracy(const Alignment& a);

struct FoldStats {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation (n - 1)
  double stderr_ = 0.0;  // sd / sqrt(k)
  std::size_t k() const { return values.size(); }
};

/// Throws InputError for an empty list.
FoldStats fold_stats(std::span<const double> values);

/// Spearman rank correlation of two numeric samples; ties get average ranks.
double spearman(std::span<const double> x, std::span<const double> y);
/// Spearman correlation of two rankings of the same labels (best first).
/// Throws InputError when the label sets differ.
double spearman(std::span<const std::string> ranking_a, std::span<const std::string> ranking_b);

/// +2 / +1 / 0 / -1 / -2 band of a cell mean against a baseline mean and its
/// error bar. Exact equality scores 0; a mean on the error-bar edge takes
/// the inner band.
int band_score(double mean, double baseline_mean, double baseline_stderr);

struct WeightedRankInput {
  std::vector<std::string> maps;
  std::vector<std::string> speakers;
  /// Speaker each map was derived from; that cell scores 0.
  std::map<std::string, std::string> owner;
  /// (map, test speaker) -> result of that map on that speaker.
  std::map<std::pair<std::string, std::string>, FoldStats> cells;
  /// Speaker -> result with the speaker's own map.
  std::map<std::string, FoldStats> baseline;
};

struct WeightedRank {
  std::map<std::pair<std::string, std::string>, int> cell_scores;
  std::map<std::string, int> totals;
};

/// Throws InputError for a missing cell or baseline.
WeightedRank weighted_rank(const WeightedRankInput& in);

}  // namespace visemes
