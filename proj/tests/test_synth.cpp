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


#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "visemes/error.hpp"
#include "visemes/synth.hpp"

using namespace visemes;

TEST_CASE("variation of information on small partitions") {
  P2VMap planted("p", {{"v01", {"a", "b"}}, {"v02", {"c", "d"}}});
  P2VMap singles("s", {{"v01", {"a"}}, {"v02", {"b"}}, {"v03", {"c"}}, {"v04", {"d"}}});
  // H(singles | planted) = ln 2, H(planted | singles) = 0
  CHECK(variation_of_information(planted, singles) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(variation_of_information(singles, planted) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  P2VMap relabeled("r", {{"x", {"d", "c"}}, {"y", {"b", "a"}}});
  CHECK(variation_of_information(planted, relabeled) == 0.0);
  CHECK(variation_of_information(planted, planted) == 0.0);
  // {a,b,c,d} in one class against two pairs: H = ln 2 one way, 0 the other
  P2VMap one("o", {{"v01", {"a", "b", "c", "d"}}});
  CHECK(variation_of_information(planted, one) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // garbage counts as singletons
  P2VMap garbage("g", {{"v01", {"a", "b"}}}, {"c", "d"});
  P2VMap split("t", {{"v01", {"a", "b"}}, {"v02", {"c"}}, {"v03", {"d"}}});
  CHECK(variation_of_information(garbage, split) == 0.0);
}

TEST_CASE("default world covers its inventory") {
  auto w = default_world(3);
  std::set<std::string> used;
  for (const auto& [word, prons] : w.vocab.entries())
    for (const auto& p : prons.front()) used.insert(p);
  CHECK(used.size() == w.inventory.phonemes().size());
  CHECK(w.planted.viseme_count() == 8);
  CHECK(w.planted.phoneme_count() == 16);
  CHECK(w.vocab.word_count() == 40);
  CHECK(plant_recovery_check(w, w.planted) == 0.0);
}

TEST_CASE("zero epsilon makes planted classes emission-identical") {
  auto w = default_world(1, 0.0);
  for (const auto& c : w.planted.classes())
    for (const auto& p : c.phonemes) CHECK(w.phoneme_means.at(p) == w.phoneme_means.at(c.phonemes.front()));
  auto e = default_world(1, 0.5);
  CHECK(e.phoneme_means.at("p") != e.phoneme_means.at("b"));
  double d = 0;
  for (std::size_t k = 0; k < e.dim; ++k) {
    const double x = e.phoneme_means.at("p")[k] - e.base_means.at("v01")[k];
    d += x * x;
  }
  CHECK(std::sqrt(d) == doctest::Approx(0.5));
}

TEST_CASE("base means sit the requested distance apart") {
  auto w = default_world(2, 0.0, 6.0);
  for (const auto& [a, ma] : w.base_means)
    for (const auto& [b, mb] : w.base_means) {
      if (a == b) continue;
      double d = 0;
      for (std::size_t k = 0; k < w.dim; ++k) d += (ma[k] - mb[k]) * (ma[k] - mb[k]);
      CHECK(std::sqrt(d) >= 6.0 - 1e-9);
    }
  w.dim = 3;
  w.finalize();
  for (const auto& [a, ma] : w.base_means)
    for (const auto& [b, mb] : w.base_means) {
      if (a == b) continue;
      double d = 0;
      for (std::size_t k = 0; k < w.dim; ++k) d += (ma[k] - mb[k]) * (ma[k] - mb[k]);
      CHECK(std::sqrt(d) >= 6.0 - 1e-9);
    }
}

TEST_CASE("generated corpora are deterministic and consistent") {
  auto w = default_world(9);
  auto a = generate(w, 12);
  auto b = generate(w, 12);
  REQUIRE(a.streams.size() == 12);
  CHECK(a.words.size() == 12);
  CHECK(a.phonemes.size() == 12);
  for (std::size_t u = 0; u < 12; ++u) {
    CHECK(a.streams[u].data == b.streams[u].data);
    const auto& ph = a.phonemes.utterances()[u].labels;
    const auto frames = a.streams[u].frames();
    CHECK(frames >= ph.size() * w.min_frames);
    CHECK(frames <= ph.size() * w.max_frames);
    const auto nw = a.words.utterances()[u].labels.size();
    CHECK(nw >= w.min_words);
    CHECK(nw <= w.max_words);
  }
  // a prefix does not depend on the corpus size
  auto c = generate(w, 3);
  CHECK(c.streams[2].data == a.streams[2].data);
  CHECK(generate(w, 0).streams.empty());
}

TEST_CASE("generation with an outside vocabulary") {
  auto w = default_world(4);
  PronDict ok;
  ok.add("PA", {"p", "aa"});
  auto c = generate(w, 2, ok);
  CHECK(c.words.utterances()[0].labels.front() == "PA");
  PronDict bad;
  bad.add("ZOO", {"z", "uw"});
  CHECK_THROWS_AS(generate(w, 2, bad), InputError);
}

TEST_CASE("world files round-trip") {
  auto w = default_world(5, 0.25);
  std::stringstream ss;
  write_world(ss, w);
  auto back = parse_world(ss);
  CHECK(same_partition(back.planted, w.planted));
  CHECK(back.epsilon == 0.25);
  CHECK(back.seed == 5);
  CHECK(back.vocab.entries() == w.vocab.entries());
  CHECK(back.phoneme_means == w.phoneme_means);
  std::istringstream bad("[world]\ndim: two\n");
  CHECK_THROWS_AS(parse_world(bad), ParseError);
  std::istringstream unknown("[weird]\n");
  CHECK_THROWS_AS(parse_world(unknown), ParseError);
  std::istringstream uncovered("[inventory]\np: consonant\n[map]\nv01: p\n[vocab]\nX: p q\n");
  CHECK_THROWS_AS(parse_world(uncovered), ParseError);
}
