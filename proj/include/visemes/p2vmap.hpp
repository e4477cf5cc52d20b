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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "visemes/phoneme.hpp"

namespace visemes {

inline constexpr std::string_view kGarbageLabel = "gar";

/// True for the reserved passthrough labels `sil` and `sp`.
bool is_special_label(std::string_view label);

struct VisemeClass {
  std::string label;
  std::vector<std::string> phonemes;
};

/// A partition of a phoneme inventory into labeled viseme classes.
///
/// Three kinds of class exist: ordinary viseme classes (in canonical order,
/// the order they were given), an optional garbage class (`gar`) collecting
/// phonemes the map does not model, and special passthrough classes
/// (`sil`, `sp`). No phoneme may appear twice anywhere in the map.
///
/// Map file format, one class per line:
///
///     %name lee
///     %provenance free text
///     %split
///     v01: p b m
///     gar: zh
///     sil: sil
///
/// `%` lines are optional directives; `#` starts a comment.
class P2VMap {
 public:
  P2VMap() = default;
  /// Throws InputError when classes overlap, a class is empty, or labels repeat.
  P2VMap(std::string name, std::vector<VisemeClass> classes, std::vector<std::string> garbage = {},
         std::vector<VisemeClass> special = {});

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }
  /// When set, the map claims that no class mixes vowels and consonants.
  bool split() const { return split_; }
  void set_split(bool s) { split_ = s; }

  const std::vector<VisemeClass>& classes() const { return classes_; }
  const std::vector<std::string>& garbage() const { return garbage_; }
  const std::vector<VisemeClass>& special() const { return special_; }

  /// Viseme label for a phoneme: its class label, `gar`, or a special label.
  std::optional<std::string> viseme_of(std::string_view phoneme) const;
  /// As viseme_of; throws InputError naming the uncovered phoneme.
  const std::string& viseme_for(std::string_view phoneme) const;
  bool covers(std::string_view phoneme) const { return lookup_.count(std::string(phoneme)) != 0; }

  const VisemeClass* find_class(std::string_view label) const;

  /// Ordinary viseme classes only (#V).
  std::size_t viseme_count() const { return classes_.size(); }
  /// Phonemes inside ordinary classes (#P).
  std::size_t phoneme_count() const;
  /// Phonemes inside ordinary classes, in canonical order.
  std::vector<std::string> class_phonemes() const;
  /// Every phoneme the map covers, garbage and special included.
  std::vector<std::string> covered_phonemes() const;
  /// Labels the map can emit: class labels, then `gar` if present, then specials.
  std::vector<std::string> output_labels() const;

 private:
  void index();

  std::string name_;
  std::string provenance_;
  bool split_ = false;
  std::vector<VisemeClass> classes_;
  std::vector<std::string> garbage_;
  std::vector<VisemeClass> special_;
  std::map<std::string, std::string> lookup_;
};

/// `v01`, `v02`, ... for zero-based index.
std::string viseme_label(std::size_t index);

/// Order-insensitive equality of the partitions (classes, garbage, specials).
/// Labels and class order are ignored.
bool same_partition(const P2VMap& a, const P2VMap& b);

/// Returns the first class mixing vowels and consonants, if any. Phonemes
/// unknown to the inventory are ignored.
std::optional<std::string> find_mixed_class(const P2VMap& map, const Inventory& inventory);

P2VMap identity_map(const std::vector<std::string>& phonemes, std::string name = "identity");

P2VMap parse_map(std::istream& in, const std::string& source = "<map>");
P2VMap load_map(const std::filesystem::path& path);
void write_map(std::ostream& out, const P2VMap& map);
void save_map(const std::filesystem::path& path, const P2VMap& map);

/// #V / #P over ordinary classes. Silence and garbage are excluded.
/// Throws InputError when the map has no ordinary class.
double compression_factor(const P2VMap& map);

/// Union of a consonant map and a vowel map, classes relabeled `v01..` in
/// order (consonant classes first). When an inventory is given, its
/// uncovered phonemes are routed to garbage (silence and short-pause symbols
/// become `sil` / `sp` passthrough classes) and the consonant/vowel
/// preconditions are checked. Throws InputError on overlap.
P2VMap pair_maps(const P2VMap& consonants, const P2VMap& vowels, const Inventory* inventory = nullptr,
                 std::string name = {});

/// Moves every class whose training count falls below
/// mean - k_se * (sigma / sqrt(n)) into the garbage class. sigma is the sample
/// standard deviation over the n ordinary classes. Classes absent from
/// `counts` are treated as having zero samples.
P2VMap garbage_threshold(const P2VMap& map, const std::map<std::string, double>& counts, double k_se);

}  // namespace visemes
