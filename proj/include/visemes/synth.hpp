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
#include <string>
#include <vector>

#include "visemes/features.hpp"
#include "visemes/lexicon.hpp"
#include "visemes/p2vmap.hpp"
#include "visemes/phoneme.hpp"

namespace visemes {

/// A synthetic world with known viseme structure. Every phoneme of a
/// planted class emits around its viseme's base mean plus a phoneme offset
/// of length epsilon * sigma; base means sit `separation` sigmas apart.
struct PlantedWorld {
  Inventory inventory;
  P2VMap planted;
  PronDict vocab;
  std::size_t dim = 8;
  double separation = 6.0;
  double sigma = 1.0;
  double epsilon = 0.0;
  std::size_t min_frames = 4;  // per phoneme
  std::size_t max_frames = 8;
  std::size_t min_words = 2;  // per utterance
  std::size_t max_words = 4;
  std::uint64_t seed = 0;

  /// Filled by finalize(): per-viseme base means and per-phoneme means.
  std::map<std::string, std::vector<double>> base_means;
  std::map<std::string, std::vector<double>> phoneme_means;

  /// Checks the configuration and derives the means from the seed. Throws
  /// InputError on inconsistent settings or uncovered vocabulary.
  void finalize();
};

/// A built-in world: 10 consonants in 5 planted classes and 6 vowels in 3,
/// with a seeded 40-word vocabulary of CV syllables.
PlantedWorld default_world(std::uint64_t seed, double epsilon = 0.0, double separation = 6.0);

/// Reads `[world]`, `[inventory]`, `[map]` and `[vocab]` sections of
/// `key: value` lines, then finalizes.
PlantedWorld parse_world(std::istream& in, const std::string& source = "<world>");
PlantedWorld load_world(const std::filesystem::path& path);
void write_world(std::ostream& out, const PlantedWorld& w);

struct Corpus {
  std::vector<FeatureStream> streams;
  Transcript words{Level::word};
  Transcript phonemes{Level::phoneme};
};

/// n utterances; utterance u draws from its own seed derived from the
/// world seed and u. Pronunciations use the first variant.
Corpus generate(const PlantedWorld& world, std::size_t n_utterances);
/// As above with another vocabulary. Throws InputError when a pronunciation
/// uses a phoneme the world does not emit.
Corpus generate(const PlantedWorld& world, std::size_t n_utterances, const PronDict& vocab);

/// Variation of information (natural log) between the planted partition
/// and `derived`, over the phonemes of either map's ordinary classes. A
/// phoneme outside a map's ordinary classes counts as a singleton there.
double plant_recovery_check(const PlantedWorld& world, const P2VMap& derived);
double variation_of_information(const P2VMap& a, const P2VMap& b);

}  // namespace visemes
