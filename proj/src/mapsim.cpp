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


#include "visemes/mapsim.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

namespace {

struct Placement {
  std::size_t cls;
  double weight;
};

std::map<std::string, Placement> placements(const P2VMap& m) {
  std::map<std::string, Placement> out;
  for (std::size_t c = 0; c < m.classes().size(); ++c) {
    const auto& members = m.classes()[c].phonemes;
    for (const auto& p : members) out[p] = {c, 1.0 / static_cast<double>(members.size())};
  }
  return out;
}

}  // namespace

SimilarityReport similarity(const P2VMap& a, const P2VMap& b) {
  const auto pa = placements(a);
  const auto pb = placements(b);
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  SimilarityReport r;
  for (const auto& [phoneme, x] : pa) {
    auto it = pb.find(phoneme);
    if (it == pb.end()) continue;
    cells[{x.cls, it->second.cls}] += x.weight + it->second.weight;
    ++r.matched_phonemes;
  }
  if (r.matched_phonemes == 0)
    throw InputError("maps '" + a.name() + "' and '" + b.name() + "' share no phoneme");
  for (const auto& [key, w] : cells) {
    r.match_table.push_back({key.first, key.second, w});
    if (key.first < key.second) r.upper += w;
    if (key.first > key.second) r.lower += w;
  }
  r.score = std::abs(r.upper - r.lower) / static_cast<double>(r.matched_phonemes);
  return r;
}

std::vector<std::vector<double>> similarity_matrix(const std::vector<P2VMap>& maps) {
  if (maps.size() < 2) throw InputError("a similarity matrix needs at least two maps");
  std::vector<std::vector<double>> out(maps.size(), std::vector<double>(maps.size(), 0.0));
  for (std::size_t i = 0; i < maps.size(); ++i)
    for (std::size_t j = 0; j < maps.size(); ++j) out[i][j] = similarity(maps[i], maps[j]).score;
  return out;
}

void write_similarity_csv(std::ostream& out, const std::vector<P2VMap>& maps,
                          const std::vector<std::vector<double>>& scores, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "map";
  for (const auto& m : maps) out << ',' << m.name();
  out << '\n';
  for (std::size_t i = 0; i < maps.size(); ++i) {
    out << maps[i].name();
    for (std::size_t j = 0; j < maps.size(); ++j) out << ',' << format_fixed(scores.at(i).at(j), 3);
    out << '\n';
  }
}

}  // namespace visemes
