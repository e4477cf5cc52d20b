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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "visemes/features.hpp"
#include "visemes/p2vmap.hpp"

namespace visemes {

using LabelSeq = std::vector<std::string>;

/// Diagonal-covariance Gaussian mixture.
struct Gmm {
  std::vector<double> weights;
  std::vector<double> means;  // mixtures x dim
  std::vector<double> vars;   // mixtures x dim

  std::size_t mixtures() const { return weights.size(); }
  std::size_t dim() const { return weights.empty() ? 0 : means.size() / weights.size(); }
  /// log sum_m w_m N(x; mu_m, var_m)
  double log_prob(std::span<const double> x) const;
  /// Per-component log(w_m N(x; ...)) into `out`; returns their log-sum.
  double component_log_probs(std::span<const double> x, std::vector<double>& out) const;
  friend bool operator==(const Gmm&, const Gmm&) = default;
};

/// Left-to-right HMM with non-emitting entry (0) and exit (n+1) states.
struct HmmModel {
  std::string label;
  std::size_t n_states = 0;
  std::vector<double> trans;  // (n+2) x (n+2), probabilities
  std::vector<Gmm> states;    // n emitting states

  double a(std::size_t i, std::size_t j) const { return trans[i * (n_states + 2) + j]; }
  double& a(std::size_t i, std::size_t j) { return trans[i * (n_states + 2) + j]; }
  friend bool operator==(const HmmModel&, const HmmModel&) = default;
};

struct ModelSet {
  std::size_t dim = 0;
  std::vector<double> var_floor;
  std::map<std::string, HmmModel> models;

  const HmmModel& at(const std::string& label) const;
  bool contains(const std::string& label) const { return models.count(label) != 0; }
  std::vector<std::string> labels() const;
  friend bool operator==(const ModelSet&, const ModelSet&) = default;
};

struct ProtoConfig {
  std::size_t n_states = 3;
  std::size_t mixtures = 1;
  /// Variance floor relative to the global variance per dimension.
  double floor_scale = 1e-4;
  std::uint64_t seed = 0;
};

/// Every model gets the global mean and variance of `train` in every state,
/// self/next transitions of 0.5. Extra mixture components are the global
/// mean shifted by +-0.1 sigma along seeded random sign vectors, shared by
/// all models. Throws InputError for empty data, mismatched dimensions or
/// an empty label set.
ModelSet flat_start(const std::vector<std::string>& labels, std::span<const FeatureStream> train,
                    const ProtoConfig& proto = {});

/// Phoneme models as exact copies of their viseme's model. Garbage phonemes
/// copy the `gar` model and special phonemes their special label's model.
/// Throws InputError for a phoneme the map does not cover or a parent
/// without a model.
ModelSet weak_learn_init(const ModelSet& visemes, const P2VMap& map, const std::vector<std::string>& phonemes);

void write_models(std::ostream& out, const ModelSet& m);
ModelSet parse_models(std::istream& in, const std::string& source = "<models>");
void save_models(const std::filesystem::path& path, const ModelSet& m);
ModelSet load_models(const std::filesystem::path& path);

struct Segment {
  std::string label;
  std::size_t start = 0;  // first frame
  std::size_t end = 0;    // one past the last frame
};

struct ForcedAlignment {
  std::vector<Segment> segments;
  double log_likelihood = 0.0;  // best-path score
};

/// Viterbi segmentation constrained to the label order. Throws ComputeError
/// when the stream has fewer frames than the labels' emitting states, and
/// InputError for an empty transcript or a label without a model.
ForcedAlignment forced_align(const ModelSet& models, const FeatureStream& stream, const LabelSeq& labels);

/// log P(stream | labels) by the forward algorithm.
double sequence_log_likelihood(const ModelSet& models, const FeatureStream& stream, const LabelSeq& labels);

struct TrainConfig {
  std::size_t passes = 11;
  /// After this many passes, each utterance's transcript is replaced by the
  /// pronunciation variant that force-aligns best.
  std::optional<std::size_t> align_at = 7;
};

struct TrainLog {
  /// Total log-likelihood under the model each pass started from.
  std::vector<double> log_likelihood;
  std::vector<std::size_t> realigned_after;
  /// Utterances too short for their transcript; left out of training.
  std::size_t skipped = 0;
  /// Chosen variant per utterance after the last realignment.
  std::vector<std::size_t> chosen;
};

/// Embedded Baum-Welch re-estimation. `variants[u]` lists the candidate
/// label sequences of utterance u; the first is used until realignment.
/// Throws InputError when sizes disagree or a label has no model.
TrainLog reestimate(ModelSet& models, std::span<const FeatureStream> streams,
                    std::span<const std::vector<LabelSeq>> variants, const TrainConfig& cfg = {});

}  // namespace visemes
