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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "visemes/confusion.hpp"
#include "visemes/p2vmap.hpp"
#include "visemes/phoneme.hpp"

namespace visemes {

enum class ClusterMode { strict, relaxed };
/// `split` forbids classes that mix vowels and consonants.
enum class VcPolicy { mixed, split };
/// Deterministic ties prefer the lexicographically smallest labels;
/// `seeded_random` picks uniformly among tied candidates.
enum class TieBreak { lexicographic, seeded_random };

struct ClusterConfig {
  ClusterMode mode = ClusterMode::strict;
  VcPolicy vc_policy = VcPolicy::mixed;
  /// Controlled merging only: emit just these sizes (strictly decreasing, >= 2).
  std::vector<std::size_t> target_sizes;
  TieBreak tie_break = TieBreak::lexicographic;
  std::uint64_t seed = 0;
  /// Needed for the split policy; labels it does not know are rejected.
  std::optional<Inventory> inventory;
  std::string name = "derived";

  /// Throws InputError for inconsistent settings.
  void validate() const;
};

/// Strictly-confused clustering.
///
/// Labels with an empty row and column go to garbage. Labels recognised only
/// as themselves become single-phoneme visemes. Then, repeatedly, the largest
/// group whose members are pairwise confused (K[r][s] + K[s][r] > 0, same
/// vowel/consonant class under the split policy) is accepted, ranked by size,
/// then by total mutual confusion, then lexicographically. Leftovers become
/// singletons. Diagonal counts never count as confusion.
P2VMap strict_cluster(const ConfusionMatrix& k, const ClusterConfig& cfg);

/// Relaxed second pass. Each singleton of `strict` joins the multi-member
/// class with which its summed mutual confusion is largest (ties: lowest
/// viseme label). A singleton confused with no class stays, or moves to
/// garbage when it was never recognised as itself.
P2VMap relaxed_cluster(const ConfusionMatrix& k, const P2VMap& strict, const ClusterConfig& cfg);

/// Strict, then relaxed when cfg.mode says so.
P2VMap cluster(const ConfusionMatrix& k, const ClusterConfig& cfg);

/// Greedy common-pair clustering over a catalog: unordered phoneme pairs are
/// counted by class co-membership and processed in descending count; a pair
/// starts a class when both phonemes are free, extends a class when one is
/// free, and is skipped otherwise. Unpaired phonemes become singletons.
P2VMap common_pair_cluster(std::span<const P2VMap> catalog, std::string name = "common-pair");

struct MergeStep {
  std::size_t size_after = 0;
  std::vector<std::string> merged_a;  // members of the two classes merged
  std::vector<std::string> merged_b;
  double q = 0.0;
};

struct ControlledMerge {
  /// Maps at sizes m, m-1, ... (filtered by cfg.target_sizes when set).
  std::vector<P2VMap> maps;
  std::vector<MergeStep> steps;
  std::vector<std::string> warnings;
};

/// Controlled-size agglomerative merging on q = P[r][s] + P[s][r], P the
/// column-normalised class-level matrix. Merged classes have their rows and
/// columns summed. Stops at two classes or when no legal pair remains.
ControlledMerge controlled_merge(const ConfusionMatrix& k, const ClusterConfig& cfg);

/// Multi-speaker (no hold-out) or speaker-independent (hold-out) map:
/// accumulate the selected speakers' matrices, then cluster.
/// Throws InputError for an unknown hold-out or fewer than two speakers
/// when holding one out.
P2VMap derive_ms_si(std::span<const std::pair<std::string, ConfusionMatrix>> speakers,
                    const std::optional<std::string>& hold_out, const ClusterConfig& cfg);

}  // namespace visemes
