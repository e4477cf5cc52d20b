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


#include "visemes/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

void PronDict::add(std::string_view word, Pronunciation pron, bool allow_duplicate) {
  if (!is_valid_symbol(word)) throw InputError("invalid dictionary word '" + std::string(word) + "'");
  auto& prons = entries_[to_upper(word)];
  if (!allow_duplicate && std::find(prons.begin(), prons.end(), pron) != prons.end())
    throw InputError("duplicate pronunciation for " + to_upper(word));
  prons.push_back(std::move(pron));
}

bool PronDict::contains(std::string_view word) const { return entries_.count(to_upper(word)) != 0; }

const std::vector<Pronunciation>& PronDict::lookup(std::string_view word) const {
  auto it = entries_.find(to_upper(word));
  if (it == entries_.end()) throw InputError("out-of-vocabulary word '" + std::string(word) + "'");
  return it->second;
}

std::size_t PronDict::pronunciation_count() const {
  std::size_t n = 0;
  for (const auto& [w, prons] : entries_) n += prons.size();
  return n;
}

PronDict parse_dict(std::istream& in, const std::string& source, const Inventory* inventory, DictOptions options) {
  PronDict dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(strip_comment(line));
    if (fields.empty()) continue;
    if (fields.size() < 2) throw ParseError(source, lineno, "word '" + fields[0] + "' has no pronunciation");
    Pronunciation pron;
    pron.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::string sym = options.strip_stress ? strip_stress(fields[i]) : fields[i];
      if (inventory && !inventory->contains(sym))
        throw ParseError(source, lineno, "unknown phoneme '" + sym + "'");
      pron.push_back(std::move(sym));
    }
    try {
      dict.add(fields[0], std::move(pron));
    } catch (const InputError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return dict;
}

PronDict load_dict(const std::filesystem::path& path, const Inventory& inventory, DictOptions options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dictionary " + path.string());
  return parse_dict(in, path.string(), &inventory, options);
}

void write_dict(std::ostream& out, const PronDict& dict) {
  for (const auto& [word, prons] : dict.entries())
    for (const auto& pron : prons) out << word << '\t' << join(pron, " ") << '\n';
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::word: return "word";
    case Level::phoneme: return "phoneme";
    case Level::viseme: return "viseme";
  }
  return "?";
}

Level parse_level(std::string_view s) {
  if (s == "word") return Level::word;
  if (s == "phoneme") return Level::phoneme;
  if (s == "viseme") return Level::viseme;
  throw InputError("unknown level '" + std::string(s) + "'");
}

void Transcript::add(Utterance u) {
  if (u.id.empty()) throw InputError("utterance without id");
  if (index_.count(u.id)) throw InputError("duplicate utterance id " + u.id);
  index_.emplace(u.id, utts_.size());
  utts_.push_back(std::move(u));
}

const Utterance* Transcript::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &utts_[it->second];
}

Transcript parse_transcript(std::istream& in, const std::string& source, Level level) {
  Transcript t(level);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw ParseError(source, lineno, "expected id<TAB>fold<TAB>labels");
    Utterance u{std::string(trim(cols[0])), std::string(trim(cols[1])), split_ws(cols[2])};
    try {
      t.add(std::move(u));
    } catch (const InputError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return t;
}

Transcript load_transcript(const std::filesystem::path& path, Level level) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open transcript " + path.string());
  return parse_transcript(in, path.string(), level);
}

void write_transcript(std::ostream& out, const Transcript& t) {
  for (const auto& u : t.utterances()) out << u.id << '\t' << u.fold << '\t' << join(u.labels, " ") << '\n';
}

std::vector<ExpandedUtterance> words_to_phonemes(const Transcript& words, const PronDict& dict, VariantPolicy policy,
                                                 std::size_t max_variants) {
  std::vector<ExpandedUtterance> out;
  out.reserve(words.size());
  for (const auto& u : words.utterances()) {
    ExpandedUtterance e{u.id, u.fold, {{}}};
    for (const auto& w : u.labels) {
      const auto& prons = dict.lookup(w);
      if (policy == VariantPolicy::first) {
        auto& seq = e.variants.front();
        seq.insert(seq.end(), prons.front().begin(), prons.front().end());
        continue;
      }
      if (e.variants.size() * prons.size() > max_variants)
        throw InputError("utterance " + u.id + " expands to more than " + std::to_string(max_variants) +
                         " pronunciation variants");
      std::vector<std::vector<std::string>> next;
      next.reserve(e.variants.size() * prons.size());
      for (const auto& prefix : e.variants)
        for (const auto& pron : prons) {
          auto seq = prefix;
          seq.insert(seq.end(), pron.begin(), pron.end());
          next.push_back(std::move(seq));
        }
      e.variants = std::move(next);
    }
    out.push_back(std::move(e));
  }
  return out;
}

Transcript words_to_phonemes(const Transcript& words, const PronDict& dict) {
  Transcript t(Level::phoneme);
  for (auto& e : words_to_phonemes(words, dict, VariantPolicy::first))
    t.add({std::move(e.id), std::move(e.fold), std::move(e.variants.front())});
  return t;
}

std::vector<std::string> phonemes_to_visemes(std::span<const std::string> phonemes, const P2VMap& map) {
  std::vector<std::string> out;
  out.reserve(phonemes.size());
  for (const auto& p : phonemes) out.push_back(map.viseme_for(p));
  return out;
}

Transcript phonemes_to_visemes(const Transcript& phonemes, const P2VMap& map) {
  Transcript t(Level::viseme);
  for (const auto& u : phonemes.utterances()) t.add({u.id, u.fold, phonemes_to_visemes(u.labels, map)});
  return t;
}

PronDict viseme_dict(const PronDict& dict, const P2VMap& map) {
  PronDict out;
  for (const auto& [word, prons] : dict.entries())
    for (const auto& pron : prons) out.add(word, phonemes_to_visemes(pron, map), true);
  return out;
}

HomophoneReport homophone_tokens(const PronDict& vdict) {
  HomophoneReport r;
  for (const auto& [word, prons] : vdict.entries()) {
    for (const auto& pron : prons) {
      auto& words = r.groups[join(pron, " ")];
      if (std::find(words.begin(), words.end(), word) == words.end()) words.push_back(word);
    }
  }
  r.tokens = r.groups.size();
  return r;
}

double guessing_baseline(std::span<const std::size_t> token_counts, std::size_t total_words, std::size_t n_tokens) {
  if (total_words == 0) throw InputError("guessing baseline needs at least one word");
  if (n_tokens == 0 || token_counts.size() != n_tokens)
    throw InputError("guessing baseline: token count does not match the counts given");
  std::size_t sum = 0;
  for (auto c : token_counts) sum += c;
  if (sum != total_words)
    throw InputError("guessing baseline: token counts sum to " + std::to_string(sum) + ", expected " +
                     std::to_string(total_words));
  double p = 0.0;
  const double w = static_cast<double>(total_words);
  const double n = static_cast<double>(n_tokens);
  for (auto c : token_counts) p += (static_cast<double>(c) / w) * (1.0 / n);
  return p;
}

}  // namespace visemes
