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


#include "visemes/p2vmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

bool is_special_label(std::string_view label) { return label == "sil" || label == "sp"; }

P2VMap::P2VMap(std::string name, std::vector<VisemeClass> classes, std::vector<std::string> garbage,
               std::vector<VisemeClass> special)
    : name_(std::move(name)),
      classes_(std::move(classes)),
      garbage_(std::move(garbage)),
      special_(std::move(special)) {
  index();
}

void P2VMap::index() {
  lookup_.clear();
  std::set<std::string> labels;
  auto claim = [&](const std::string& phoneme, const std::string& label) {
    if (!is_valid_symbol(phoneme)) throw InputError("map '" + name_ + "': invalid phoneme '" + phoneme + "'");
    auto [it, fresh] = lookup_.emplace(phoneme, label);
    if (!fresh)
      throw InputError("map '" + name_ + "': phoneme '" + phoneme + "' in both " + it->second + " and " + label);
  };
  auto check_label = [&](const VisemeClass& c) {
    if (!is_valid_symbol(c.label)) throw InputError("map '" + name_ + "': invalid viseme label");
    if (c.label == kGarbageLabel) throw InputError("map '" + name_ + "': 'gar' is reserved for the garbage class");
    if (!labels.insert(c.label).second) throw InputError("map '" + name_ + "': duplicate viseme label " + c.label);
    if (c.phonemes.empty()) throw InputError("map '" + name_ + "': empty class " + c.label);
  };
  for (const auto& c : classes_) {
    check_label(c);
    if (is_special_label(c.label))
      throw InputError("map '" + name_ + "': label " + c.label + " is reserved for passthrough classes");
    for (const auto& p : c.phonemes) claim(p, c.label);
  }
  for (const auto& p : garbage_) claim(p, std::string(kGarbageLabel));
  for (const auto& c : special_) {
    check_label(c);
    for (const auto& p : c.phonemes) claim(p, c.label);
  }
}

std::optional<std::string> P2VMap::viseme_of(std::string_view phoneme) const {
  auto it = lookup_.find(std::string(phoneme));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

const std::string& P2VMap::viseme_for(std::string_view phoneme) const {
  auto it = lookup_.find(std::string(phoneme));
  if (it == lookup_.end())
    throw InputError("phoneme '" + std::string(phoneme) + "' is not covered by map '" + name_ + "'");
  return it->second;
}

const VisemeClass* P2VMap::find_class(std::string_view label) const {
  for (const auto& c : classes_)
    if (c.label == label) return &c;
  for (const auto& c : special_)
    if (c.label == label) return &c;
  return nullptr;
}

std::size_t P2VMap::phoneme_count() const {
  std::size_t n = 0;
  for (const auto& c : classes_) n += c.phonemes.size();
  return n;
}

std::vector<std::string> P2VMap::class_phonemes() const {
  std::vector<std::string> out;
  for (const auto& c : classes_) out.insert(out.end(), c.phonemes.begin(), c.phonemes.end());
  return out;
}

std::vector<std::string> P2VMap::covered_phonemes() const {
  auto out = class_phonemes();
  out.insert(out.end(), garbage_.begin(), garbage_.end());
  for (const auto& c : special_) out.insert(out.end(), c.phonemes.begin(), c.phonemes.end());
  return out;
}

std::vector<std::string> P2VMap::output_labels() const {
  std::vector<std::string> out;
  for (const auto& c : classes_) out.push_back(c.label);
  if (!garbage_.empty()) out.emplace_back(kGarbageLabel);
  for (const auto& c : special_) out.push_back(c.label);
  return out;
}

std::string viseme_label(std::size_t index) {
  std::string digits = std::to_string(index + 1);
  if (digits.size() < 2) digits.insert(0, 2 - digits.size(), '0');
  return "v" + digits;
}

namespace {

std::set<std::set<std::string>> partition_sets(const P2VMap& m) {
  std::set<std::set<std::string>> out;
  for (const auto& c : m.classes()) out.emplace(c.phonemes.begin(), c.phonemes.end());
  for (const auto& c : m.special()) out.emplace(c.phonemes.begin(), c.phonemes.end());
  return out;
}

}  // namespace

bool same_partition(const P2VMap& a, const P2VMap& b) {
  std::set<std::string> ga(a.garbage().begin(), a.garbage().end());
  std::set<std::string> gb(b.garbage().begin(), b.garbage().end());
  return ga == gb && partition_sets(a) == partition_sets(b);
}

std::optional<std::string> find_mixed_class(const P2VMap& map, const Inventory& inventory) {
  for (const auto& c : map.classes()) {
    bool vowel = false, consonant = false;
    for (const auto& p : c.phonemes) {
      auto k = inventory.find(p);
      if (!k) continue;
      vowel |= *k == PhonemeClass::vowel;
      consonant |= *k == PhonemeClass::consonant;
    }
    if (vowel && consonant) return c.label;
  }
  return std::nullopt;
}

P2VMap identity_map(const std::vector<std::string>& phonemes, std::string name) {
  std::vector<VisemeClass> classes;
  classes.reserve(phonemes.size());
  for (std::size_t i = 0; i < phonemes.size(); ++i) classes.push_back({viseme_label(i), {phonemes[i]}});
  return P2VMap(std::move(name), std::move(classes));
}

P2VMap parse_map(std::istream& in, const std::string& source) {
  std::string name, provenance;
  bool split = false;
  std::vector<VisemeClass> classes, special;
  std::vector<std::string> garbage;
  bool have_garbage = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = trim(line);
    if (!body.empty() && body.front() == '%') {
      auto directive = body.substr(1);
      auto ws = directive.find_first_of(" \t");
      std::string key(directive.substr(0, ws));
      std::string rest(ws == std::string_view::npos ? std::string_view{} : trim(directive.substr(ws)));
      if (key == "name") {
        name = rest;
      } else if (key == "provenance") {
        provenance = provenance.empty() ? rest : provenance + " " + rest;
      } else if (key == "split") {
        split = true;
      } else {
        throw ParseError(source, lineno, "unknown directive %" + key);
      }
      continue;
    }
    body = trim(strip_comment(body));
    if (body.empty()) continue;
    auto colon = body.find(':');
    if (colon == std::string_view::npos) throw ParseError(source, lineno, "expected 'label: phonemes'");
    std::string label(trim(body.substr(0, colon)));
    auto phonemes = split_ws(body.substr(colon + 1));
    if (label.empty() || !is_valid_symbol(label)) throw ParseError(source, lineno, "bad viseme label");
    if (label == kGarbageLabel) {
      if (have_garbage) throw ParseError(source, lineno, "second garbage line");
      have_garbage = true;
      garbage = std::move(phonemes);
    } else if (is_special_label(label)) {
      special.push_back({label, std::move(phonemes)});
    } else {
      classes.push_back({label, std::move(phonemes)});
    }
  }
  if (name.empty()) name = source;
  try {
    P2VMap map(name, std::move(classes), std::move(garbage), std::move(special));
    map.set_provenance(provenance);
    map.set_split(split);
    return map;
  } catch (const InputError& e) {
    throw ParseError(source, 0, e.what());
  }
}

P2VMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open map " + path.string());
  auto map = parse_map(in, path.string());
  if (map.name() == path.string()) map.set_name(path.stem().string());
  return map;
}

void write_map(std::ostream& out, const P2VMap& map) {
  if (!map.name().empty()) out << "%name " << map.name() << '\n';
  if (!map.provenance().empty()) out << "%provenance " << map.provenance() << '\n';
  if (map.split()) out << "%split\n";
  auto line = [&](const std::string& label, const std::vector<std::string>& phonemes) {
    out << label << ':';
    for (const auto& p : phonemes) out << ' ' << p;
    out << '\n';
  };
  for (const auto& c : map.classes()) line(c.label, c.phonemes);
  if (!map.garbage().empty()) line(std::string(kGarbageLabel), map.garbage());
  for (const auto& c : map.special()) line(c.label, c.phonemes);
}

void save_map(const std::filesystem::path& path, const P2VMap& map) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_map(out, map);
}

double compression_factor(const P2VMap& map) {
  if (map.viseme_count() == 0) throw InputError("map '" + map.name() + "' has no viseme classes");
  return static_cast<double>(map.viseme_count()) / static_cast<double>(map.phoneme_count());
}

P2VMap pair_maps(const P2VMap& consonants, const P2VMap& vowels, const Inventory* inventory, std::string name) {
  if (inventory) {
    auto check = [&](const P2VMap& m, PhonemeClass want, const char* what) {
      for (const auto& p : m.class_phonemes()) {
        auto k = inventory->find(p);
        if (k && *k != want)
          throw InputError(std::string(what) + " map '" + m.name() + "' contains " +
                           std::string(to_string(*k)) + " '" + p + "'");
      }
    };
    check(consonants, PhonemeClass::consonant, "consonant");
    check(vowels, PhonemeClass::vowel, "vowel");
  }
  std::vector<VisemeClass> classes;
  std::set<std::string> used;
  for (const auto* m : {&consonants, &vowels}) {
    for (const auto& c : m->classes()) {
      for (const auto& p : c.phonemes)
        if (!used.insert(p).second)
          throw InputError("phoneme '" + p + "' appears in both '" + consonants.name() + "' and '" +
                           vowels.name() + "'");
      classes.push_back({viseme_label(classes.size()), c.phonemes});
    }
  }
  std::vector<VisemeClass> special;
  auto add_special = [&](const std::string& label, const std::string& phoneme) {
    if (used.count(phoneme)) return;
    used.insert(phoneme);
    for (auto& c : special)
      if (c.label == label) {
        c.phonemes.push_back(phoneme);
        return;
      }
    special.push_back({label, {phoneme}});
  };
  for (const auto* m : {&consonants, &vowels})
    for (const auto& c : m->special())
      for (const auto& p : c.phonemes) add_special(c.label, p);

  std::vector<std::string> garbage;
  auto add_garbage = [&](const std::string& p) {
    if (used.insert(p).second) garbage.push_back(p);
  };
  if (inventory) {
    for (const auto& ph : inventory->phonemes()) {
      if (used.count(ph.symbol)) continue;
      if (ph.klass == PhonemeClass::silence)
        add_special("sil", ph.symbol);
      else if (ph.klass == PhonemeClass::short_pause)
        add_special("sp", ph.symbol);
    }
  }
  for (const auto* m : {&consonants, &vowels})
    for (const auto& p : m->garbage()) add_garbage(p);
  if (inventory)
    for (const auto& ph : inventory->phonemes()) add_garbage(ph.symbol);

  if (name.empty()) name = consonants.name() + "+" + vowels.name();
  P2VMap out(std::move(name), std::move(classes), std::move(garbage), std::move(special));
  out.set_provenance("pairing of " + consonants.name() + " consonants with " + vowels.name() + " vowels");
  return out;
}

P2VMap garbage_threshold(const P2VMap& map, const std::map<std::string, double>& counts, double k_se) {
  const auto& classes = map.classes();
  const std::size_t n = classes.size();
  if (n == 0) return map;
  std::vector<double> values;
  values.reserve(n);
  for (const auto& c : classes) {
    auto it = counts.find(c.label);
    values.push_back(it == counts.end() ? 0.0 : it->second);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double sd = 0.0;
  if (n > 1) {
    for (double v : values) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / static_cast<double>(n - 1));
  }
  const double threshold = mean - k_se * sd / std::sqrt(static_cast<double>(n));

  std::vector<VisemeClass> kept;
  std::vector<std::string> garbage = map.garbage();
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] < threshold)
      garbage.insert(garbage.end(), classes[i].phonemes.begin(), classes[i].phonemes.end());
    else
      kept.push_back(classes[i]);
  }
  P2VMap out(map.name(), std::move(kept), std::move(garbage), map.special());
  out.set_provenance(map.provenance());
  out.set_split(map.split());
  return out;
}

}  // namespace visemes
