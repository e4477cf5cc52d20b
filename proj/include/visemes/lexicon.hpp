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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visemes/p2vmap.hpp"
#include "visemes/phoneme.hpp"

namespace visemes {

using Pronunciation = std::vector<std::string>;

/// Word -> pronunciations. Word keys are case-insensitive (stored upper
/// case); symbols keep their case.
class PronDict {
 public:
  /// Throws InputError on a repeated (word, pronunciation) pair unless
  /// `allow_duplicate` is set.
  void add(std::string_view word, Pronunciation pron, bool allow_duplicate = false);

  bool contains(std::string_view word) const;
  /// Throws InputError naming an out-of-vocabulary word.
  const std::vector<Pronunciation>& lookup(std::string_view word) const;

  const std::map<std::string, std::vector<Pronunciation>>& entries() const { return entries_; }
  std::size_t word_count() const { return entries_.size(); }
  std::size_t pronunciation_count() const;
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::vector<Pronunciation>> entries_;
};

struct DictOptions {
  bool strip_stress = true;
};

/// Reads `WORD ph1 ph2 ...` lines; `#` starts a comment. With an inventory
/// every symbol is checked against it (after stress stripping).
PronDict parse_dict(std::istream& in, const std::string& source, const Inventory* inventory,
                    DictOptions options = {});
PronDict load_dict(const std::filesystem::path& path, const Inventory& inventory, DictOptions options = {});
void write_dict(std::ostream& out, const PronDict& dict);

enum class Level { word, phoneme, viseme };
std::string_view to_string(Level level);
Level parse_level(std::string_view s);

struct Utterance {
  std::string id;
  std::string fold;
  std::vector<std::string> labels;
};

/// Ordered utterances at one level. Ids are unique.
class Transcript {
 public:
  explicit Transcript(Level level = Level::word) : level_(level) {}

  Level level() const { return level_; }
  /// Throws InputError on a repeated id.
  void add(Utterance u);
  const std::vector<Utterance>& utterances() const { return utts_; }
  const Utterance* find(std::string_view id) const;
  std::size_t size() const { return utts_.size(); }

 private:
  Level level_;
  std::vector<Utterance> utts_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// `id<TAB>fold<TAB>label label ...` per line.
Transcript parse_transcript(std::istream& in, const std::string& source, Level level);
Transcript load_transcript(const std::filesystem::path& path, Level level);
void write_transcript(std::ostream& out, const Transcript& t);

enum class VariantPolicy { first, all };

/// An utterance expanded to every pronunciation sequence it admits.
struct ExpandedUtterance {
  std::string id;
  std::string fold;
  std::vector<std::vector<std::string>> variants;
};

/// `first` yields exactly one variant per utterance; `all` the cross
/// product of per-word pronunciations (capped at `max_variants`).
std::vector<ExpandedUtterance> words_to_phonemes(const Transcript& words, const PronDict& dict,
                                                 VariantPolicy policy, std::size_t max_variants = 4096);
/// First-pronunciation phoneme transcript.
Transcript words_to_phonemes(const Transcript& words, const PronDict& dict);

std::vector<std::string> phonemes_to_visemes(std::span<const std::string> phonemes, const P2VMap& map);
Transcript phonemes_to_visemes(const Transcript& phonemes, const P2VMap& map);

/// Every pronunciation translated through the map. Identical translations
/// are kept: they are the visual homophones.
PronDict viseme_dict(const PronDict& dict, const P2VMap& map);

struct HomophoneReport {
  /// Number of distinct viseme strings (T).
  std::size_t tokens = 0;
  /// Viseme string (space separated) -> words sharing it.
  std::map<std::string, std::vector<std::string>> groups;
};

HomophoneReport homophone_tokens(const PronDict& viseme_level_dict);

/// Homophone-weighted chance: sum_i (TC_i / W) * (1 / N) over the N tokens.
/// Throws InputError when the counts do not sum to W, or W or N is zero.
double guessing_baseline(std::span<const std::size_t> token_counts, std::size_t total_words, std::size_t n_tokens);

}  // namespace visemes
