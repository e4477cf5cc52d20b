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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "visemes/clustering.hpp"
#include "visemes/confusion.hpp"
#include "visemes/decoder.hpp"
#include "visemes/hmm.hpp"
#include "visemes/p2vmap.hpp"
#include "visemes/scoring.hpp"
#include "visemes/synth.hpp"

namespace visemes {

enum class Unit { viseme, phoneme, word };
std::string_view to_string(Unit u);
/// Throws InputError for an unknown name.
Unit parse_unit(std::string_view s);
/// Classifier units cannot be finer than the network tokens they spell:
/// phoneme and word models have no viseme network. Word models need a
/// word network. Throws InputError for such a pairing.
void check_pairing(Unit units, Unit network);

struct PipelineConfig {
  std::size_t utterances = 200;
  std::size_t folds = 10;
  /// Test utterances per fold; 0 means utterances / folds.
  std::size_t test_size = 0;
  Unit units = Unit::viseme;
  Unit network = Unit::phoneme;
  /// Off: stop after the phoneme stage and the map.
  bool classify = true;
  /// Adds viseme-stage and weak-learned phoneme-stage results.
  bool weak_learn = false;
  ProtoConfig proto;
  TrainConfig train;
  DecodeConfig decode;
  double bigram_floor = 0.0;
  ClusterConfig cluster;
  /// Used instead of deriving a map from the phoneme confusions.
  std::optional<P2VMap> map;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
};

struct StageResult {
  std::string stage;
  Unit units = Unit::phoneme;
  Unit network = Unit::phoneme;
  /// One merged alignment per fold, scored at the network level.
  std::vector<Alignment> folds;
  FoldStats correctness;
  FoldStats accuracy;
};

struct PipelineResult {
  /// Phoneme classification confusions summed over the folds.
  ConfusionMatrix confusion;
  P2VMap map;
  std::vector<StageResult> stages;

  const StageResult& stage(std::string_view name) const;
};

/// Synthesises a corpus from the world, classifies phonemes over k
/// independent random splits, derives a map from the summed confusions and
/// classifies again with the configured units and network.
PipelineResult run_pipeline(const PlantedWorld& world, const PipelineConfig& cfg);

/// `stage,units,network,fold,n,deletions,substitutions,insertions,correctness,accuracy`
/// with per-fold rows followed by `mean` and `stderr` rows per stage.
void write_pipeline_csv(std::ostream& out, const PipelineResult& r, const std::string& provenance);

}  // namespace visemes
