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


#include "visemes/phoneme.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

std::string_view to_string(PhonemeClass c) {
  switch (c) {
    case PhonemeClass::vowel: return "vowel";
    case PhonemeClass::consonant: return "consonant";
    case PhonemeClass::silence: return "silence";
    case PhonemeClass::short_pause: return "short_pause";
  }
  return "?";
}

std::optional<PhonemeClass> parse_phoneme_class(std::string_view s) {
  if (s == "vowel" || s == "V") return PhonemeClass::vowel;
  if (s == "consonant" || s == "C") return PhonemeClass::consonant;
  if (s == "silence") return PhonemeClass::silence;
  if (s == "short_pause") return PhonemeClass::short_pause;
  return std::nullopt;
}

Inventory::Inventory(std::vector<Phoneme> phonemes) {
  for (auto& p : phonemes) add(std::move(p));
}

void Inventory::add(Phoneme p) {
  if (!is_valid_symbol(p.symbol)) throw InputError("invalid phoneme symbol '" + p.symbol + "'");
  if (auto it = index_.find(p.symbol); it != index_.end()) {
    if (phonemes_[it->second].klass != p.klass)
      throw InputError("phoneme '" + p.symbol + "' declared as both " +
                       std::string(to_string(phonemes_[it->second].klass)) + " and " +
                       std::string(to_string(p.klass)));
    return;
  }
  index_.emplace(p.symbol, phonemes_.size());
  phonemes_.push_back(std::move(p));
}

bool Inventory::contains(std::string_view symbol) const { return index_.find(symbol) != index_.end(); }

std::optional<PhonemeClass> Inventory::find(std::string_view symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return phonemes_[it->second].klass;
}

PhonemeClass Inventory::class_of(std::string_view symbol) const {
  auto k = find(symbol);
  if (!k) throw InputError("unknown phoneme '" + std::string(symbol) + "'");
  return *k;
}

std::vector<std::string> Inventory::symbols() const {
  std::vector<std::string> out;
  out.reserve(phonemes_.size());
  for (const auto& p : phonemes_) out.push_back(p.symbol);
  return out;
}

Inventory Inventory::parse(std::istream& in, const std::string& source) {
  Inventory inv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(strip_comment(line));
    if (fields.empty()) continue;
    if (fields.size() != 2) throw ParseError(source, lineno, "expected 'symbol class'");
    auto klass = parse_phoneme_class(fields[1]);
    if (!klass) throw ParseError(source, lineno, "unknown phoneme class '" + fields[1] + "'");
    try {
      inv.add({fields[0], *klass});
    } catch (const InputError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return inv;
}

Inventory Inventory::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open inventory " + path.string());
  return parse(in, path.string());
}

void Inventory::write(std::ostream& out) const {
  for (const auto& p : phonemes_) out << p.symbol << ' ' << to_string(p.klass) << '\n';
}

bool is_valid_symbol(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string strip_stress(std::string_view symbol) {
  auto end = symbol.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(symbol[end - 1]))) --end;
  if (end == 0) return std::string(symbol);
  return std::string(symbol.substr(0, end));
}

}  // namespace visemes
