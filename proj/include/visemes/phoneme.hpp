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
#include <string>
#include <string_view>
#include <vector>

namespace visemes {

enum class PhonemeClass : std::uint8_t { vowel, consonant, silence, short_pause };

std::string_view to_string(PhonemeClass c);
std::optional<PhonemeClass> parse_phoneme_class(std::string_view s);

struct Phoneme {
  std::string symbol;
  PhonemeClass klass = PhonemeClass::consonant;
};

/// A declared phoneme set. Each symbol carries exactly one class.
///
/// File format: one `symbol class` pair per line, where class is one of
/// `vowel`, `consonant`, `silence`, `short_pause`. `#` starts a comment.
class Inventory {
 public:
  Inventory() = default;
  explicit Inventory(std::vector<Phoneme> phonemes);

  /// Throws InputError when the symbol is already declared with another class.
  void add(Phoneme p);

  bool contains(std::string_view symbol) const;
  std::optional<PhonemeClass> find(std::string_view symbol) const;
  /// Throws InputError for unknown symbols.
  PhonemeClass class_of(std::string_view symbol) const;

  const std::vector<Phoneme>& phonemes() const { return phonemes_; }
  std::vector<std::string> symbols() const;
  std::size_t size() const { return phonemes_.size(); }
  bool empty() const { return phonemes_.empty(); }

  static Inventory parse(std::istream& in, const std::string& source = "<inventory>");
  static Inventory load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

 private:
  std::vector<Phoneme> phonemes_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Validates a phoneme/viseme/word symbol: non-empty, no whitespace.
bool is_valid_symbol(std::string_view s);

/// Removes a trailing lexical-stress digit run (`ah1` -> `ah`). Symbols that
/// are all digits are returned unchanged.
std::string strip_stress(std::string_view symbol);

}  // namespace visemes
