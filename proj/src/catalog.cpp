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


#include "visemes/catalog.hpp"

#include <cstdlib>
#include <fstream>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

std::string_view to_string(MapKind k) {
  switch (k) {
    case MapKind::consonant: return "consonant";
    case MapKind::vowel: return "vowel";
    case MapKind::full: return "full";
    case MapKind::derived: return "derived";
  }
  return "full";
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("VISEMES_DATA"); env && *env) return env;
  return VISEMES_DATA_DIR;
}

std::vector<CatalogEntry> load_catalog(const std::filesystem::path& dir_in) {
  const auto dir = dir_in.empty() ? data_dir() / "catalog" : dir_in;
  const auto index_path = dir / "INDEX";
  std::ifstream in(index_path);
  if (!in) throw InputError("cannot open catalog index " + index_path.string());
  std::vector<CatalogEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(strip_comment(line));
    if (fields.empty()) continue;
    if (fields.size() != 2) throw ParseError(index_path.string(), lineno, "expected 'name kind'");
    CatalogEntry e;
    if (fields[1] == "consonant")
      e.kind = MapKind::consonant;
    else if (fields[1] == "vowel")
      e.kind = MapKind::vowel;
    else if (fields[1] == "full")
      e.kind = MapKind::full;
    else if (fields[1] == "derived")
      e.kind = MapKind::derived;
    else
      throw ParseError(index_path.string(), lineno, "unknown map kind '" + fields[1] + "'");
    e.map = load_map(dir / (fields[0] + ".p2v"));
    if (e.map.name() != fields[0])
      throw ParseError(index_path.string(), lineno, "map file names itself '" + e.map.name() + "'");
    e.provenance = e.map.provenance();
    out.push_back(std::move(e));
  }
  return out;
}

const CatalogEntry& catalog_entry(const std::vector<CatalogEntry>& catalog, const std::string& name) {
  for (const auto& e : catalog)
    if (e.map.name() == name) return e;
  throw InputError("no catalog map named '" + name + "'");
}

Inventory default_inventory() { return Inventory::load(data_dir() / "inventory" / "british.inv"); }

}  // namespace visemes
