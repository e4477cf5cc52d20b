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
#include <string>
#include <vector>

#include "visemes/p2vmap.hpp"
#include "visemes/phoneme.hpp"

namespace visemes {

enum class MapKind { consonant, vowel, full, derived };

std::string_view to_string(MapKind k);

struct CatalogEntry {
  P2VMap map;
  std::string provenance;
  MapKind kind = MapKind::full;
};

/// Bundled data directory: $VISEMES_DATA if set, else the build-time default.
std::filesystem::path data_dir();

/// Literature maps listed in `<dir>/INDEX` (lines `name kind`), loaded from
/// `<dir>/<name>.p2v`. Defaults to the bundled catalog. Throws ParseError
/// or InputError on corrupt data.
std::vector<CatalogEntry> load_catalog(const std::filesystem::path& dir = {});

/// Finds an entry by map name; throws InputError when missing.
const CatalogEntry& catalog_entry(const std::vector<CatalogEntry>& catalog, const std::string& name);

/// The bundled British English inventory.
Inventory default_inventory();

}  // namespace visemes
