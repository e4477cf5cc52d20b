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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "visemes/hmm.hpp"

namespace visemes {

/// Bigram over tokens. Rows are probabilities over tokens followed by the
/// end symbol; each row and the start row sum to one.
struct BigramNetwork {
  std::vector<std::string> tokens;
  std::vector<double> start;   // tokens.size()
  std::vector<double> bigram;  // tokens.size() x (tokens.size() + 1), last column = end

  std::size_t size() const { return tokens.size(); }
  double p(std::size_t from, std::size_t to) const { return bigram[from * (size() + 1) + to]; }
  double p_end(std::size_t from) const { return bigram[from * (size() + 1) + size()]; }
  std::size_t index_of(const std::string& token) const;
};

/// Maximum-likelihood bigram with a probability floor: every successor
/// (and every start token) gets at least `floor` before the row is
/// renormalised. `tokens` fixes the vocabulary and its order; when empty
/// the sorted set of tokens seen is used. Throws InputError for an empty
/// corpus or a token outside `tokens`.
BigramNetwork build_bigram(std::span<const LabelSeq> corpus, double floor = 0.0,
                           const std::vector<std::string>& tokens = {});

void write_bigram(std::ostream& out, const BigramNetwork& net);

/// Token -> label sequences (pronunciations). A token missing from the
/// lexicon is taken to be a model label.
using TokenLexicon = std::map<std::string, std::vector<LabelSeq>>;

struct DecodeConfig {
  double grammar_scale = 1.0;
  /// Subtracted from the log score at every token entry.
  double transition_penalty = 0.5;
};

struct DecodeResult {
  LabelSeq tokens;
  double score = 0.0;
};

/// Viterbi token passing over the network. Throws InputError for an empty
/// stream or a label without a model, and ComputeError when no token path
/// fits the stream.
DecodeResult decode(const ModelSet& models, const BigramNetwork& net, const FeatureStream& stream,
                    const DecodeConfig& cfg = {}, const TokenLexicon& lexicon = {});

}  // namespace visemes
