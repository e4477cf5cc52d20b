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
#include <numbers>
#include <random>
#include <sstream>

#include "visemes/decoder.hpp"
#include "visemes/error.hpp"
#include "visemes/features.hpp"
#include "visemes/hmm.hpp"

using namespace visemes;

namespace {

FeatureStream stream_1d(std::vector<double> xs, std::string id = "s") {
  FeatureStream s;
  s.id = std::move(id);
  s.dim = 1;
  s.data = std::move(xs);
  return s;
}

double log_normal(double x, double mu, double var) {
  return -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * (x - mu) * (x - mu) / var;
}

// Two one-state models, "lo" around 0 and "hi" around 10, unit variance.
ModelSet two_models() {
  std::vector<FeatureStream> train{stream_1d({0, 1, 2})};
  ProtoConfig proto;
  proto.n_states = 1;
  ModelSet m = flat_start({"hi", "lo"}, train, proto);
  for (auto& [label, h] : m.models) {
    h.states[0].means = {label == "lo" ? 0.0 : 10.0};
    h.states[0].vars = {1.0};
  }
  return m;
}

}  // namespace

TEST_CASE("gmm log density matches the closed form") {
  Gmm g{{1.0}, {0.0}, {1.0}};
  std::vector<double> x{0.0};
  CHECK(g.log_prob(x) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-12));
  Gmm two{{0.25, 0.75}, {0.0, 2.0}, {1.0, 4.0}};
  std::vector<double> y{1.0};
  const double want = std::log(0.25 * std::exp(log_normal(1, 0, 1)) + 0.75 * std::exp(log_normal(1, 2, 4)));
  CHECK(two.log_prob(y) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("flat start uses the global statistics in every state") {
  std::vector<FeatureStream> train{stream_1d({1, 2, 3}), stream_1d({5, 9}, "t")};
  ModelSet m = flat_start({"a", "b"}, train);
  // mean 4, population variance (9+4+1+1+25)/5 = 8
  for (const auto& [label, h] : m.models) {
    CHECK(h.n_states == 3);
    CHECK(h.a(0, 1) == 1.0);
    for (const auto& s : h.states) {
      CHECK(s.means[0] == doctest::Approx(4.0));
      CHECK(s.vars[0] == doctest::Approx(8.0));
    }
  }
  CHECK(m.at("a").states == m.at("b").states);
  CHECK(m.var_floor[0] == doctest::Approx(8e-4));
}

TEST_CASE("flat start floors a constant dimension") {
  FeatureStream s;
  s.dim = 2;
  s.data = {1, 7, 2, 7, 3, 7};
  std::vector<FeatureStream> train{s};
  ModelSet m = flat_start({"a"}, train);
  CHECK(m.at("a").states[0].vars[1] > 0.0);
  CHECK(m.at("a").states[0].vars[1] == m.var_floor[1]);
}

TEST_CASE("flat start rejects bad input") {
  std::vector<FeatureStream> none;
  CHECK_THROWS_AS(flat_start({"a"}, none), InputError);
  FeatureStream s2;
  s2.dim = 2;
  s2.data = {1, 2};
  std::vector<FeatureStream> mixed{stream_1d({1, 2}), s2};
  CHECK_THROWS_AS(flat_start({"a"}, mixed), InputError);
  std::vector<FeatureStream> ok{stream_1d({1, 2})};
  CHECK_THROWS_AS(flat_start({}, ok), InputError);
}

TEST_CASE("one-state re-estimation reaches sample mean and population variance") {
  std::vector<FeatureStream> train{stream_1d({1, 2, 4, 9})};
  ProtoConfig proto;
  proto.n_states = 1;
  ModelSet m = flat_start({"a"}, train, proto);
  m.models.at("a").states[0].means = {-3.0};
  m.models.at("a").states[0].vars = {0.5};
  std::vector<std::vector<LabelSeq>> variants{{{"a"}}};
  TrainConfig cfg;
  cfg.passes = 1;
  cfg.align_at.reset();
  reestimate(m, train, variants, cfg);
  const auto& h = m.at("a");
  CHECK(h.states[0].means[0] == doctest::Approx(4.0));
  CHECK(h.states[0].vars[0] == doctest::Approx((9.0 + 4 + 0 + 25) / 4));
  // three self loops and one exit over four frames
  CHECK(h.a(1, 1) == doctest::Approx(0.75));
  CHECK(h.a(1, 2) == doctest::Approx(0.25));
}

TEST_CASE("re-estimation never lowers the training likelihood") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<FeatureStream> train;
  std::vector<std::vector<LabelSeq>> variants;
  for (int u = 0; u < 6; ++u) {
    std::vector<double> xs;
    LabelSeq labels;
    for (int w = 0; w < 4; ++w) {
      const bool hi = (u + w) % 2 == 0;
      labels.push_back(hi ? "hi" : "lo");
      for (int t = 0; t < 7; ++t) xs.push_back((hi ? 5.0 : 0.0) + n(rng));
    }
    train.push_back(stream_1d(xs, "u" + std::to_string(u)));
    variants.push_back({labels});
  }
  ProtoConfig proto;
  proto.mixtures = 2;
  ModelSet m = flat_start({"hi", "lo"}, train, proto);
  TrainConfig cfg;
  cfg.passes = 8;
  cfg.align_at.reset();
  auto log = reestimate(m, train, variants, cfg);
  REQUIRE(log.log_likelihood.size() == 8);
  for (std::size_t i = 1; i < log.log_likelihood.size(); ++i)
    CHECK(log.log_likelihood[i] >= log.log_likelihood[i - 1] - 1e-6 * std::abs(log.log_likelihood[i - 1]));
  CHECK(m.at("hi").states[1].means[0] > m.at("lo").states[1].means[0] + 3.0);
}

TEST_CASE("short utterances are skipped") {
  std::vector<FeatureStream> train{stream_1d({0, 1, 2, 3, 4, 5}), stream_1d({1, 2}, "short")};
  std::vector<std::vector<LabelSeq>> variants{{{"a"}}, {{"a"}}};
  ModelSet m = flat_start({"a"}, train);
  TrainConfig cfg;
  cfg.passes = 2;
  auto log = reestimate(m, train, variants, cfg);
  CHECK(log.skipped == 1);
}

TEST_CASE("realignment picks the variant that fits") {
  ModelSet m = two_models();
  // a long unambiguous utterance keeps the models in place during pass 1
  std::vector<double> anchor(40, 0.0);
  anchor.resize(80, 10.0);
  std::vector<FeatureStream> train{stream_1d({0, 0.2, -0.1, 10, 9.8, 10.3}), stream_1d(anchor, "anchor")};
  std::vector<std::vector<LabelSeq>> variants{{{"hi", "lo"}, {"lo", "hi"}}, {{"lo", "hi"}}};
  TrainConfig cfg;
  cfg.passes = 2;
  cfg.align_at = 1;
  auto log = reestimate(m, train, variants, cfg);
  REQUIRE(log.chosen.size() == 2);
  CHECK(log.chosen[0] == 1);
  CHECK(log.chosen[1] == 0);
}

TEST_CASE("forced alignment finds the switch point") {
  ModelSet m = two_models();
  auto s = stream_1d({0.1, -0.2, 0.3, 9.9, 10.1});
  auto fa = forced_align(m, s, {"lo", "hi"});
  REQUIRE(fa.segments.size() == 2);
  CHECK(fa.segments[0].label == "lo");
  CHECK(fa.segments[0].start == 0);
  CHECK(fa.segments[0].end == 3);
  CHECK(fa.segments[1].start == 3);
  CHECK(fa.segments[1].end == 5);
  // entry 1, two self loops at 0.5, switch 0.5 * 1, one self loop, exit 0.5
  double want = 5 * std::log(0.5);
  for (double x : {0.1, -0.2, 0.3}) want += log_normal(x, 0, 1);
  for (double x : {9.9, 10.1}) want += log_normal(x, 10, 1);
  CHECK(fa.log_likelihood == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("forced alignment rejects infeasible and unknown input") {
  std::vector<FeatureStream> train{stream_1d({0, 1, 2, 3, 4})};
  ModelSet m = flat_start({"a"}, train);
  LabelSeq ten(10, "a");
  CHECK_THROWS_AS(forced_align(m, train[0], ten), ComputeError);
  CHECK_THROWS_AS(forced_align(m, train[0], {"zz"}), InputError);
  CHECK_THROWS_AS(forced_align(m, train[0], {}), InputError);
}

TEST_CASE("forward likelihood of a single frame") {
  ModelSet m = two_models();
  auto s = stream_1d({0.5});
  CHECK(sequence_log_likelihood(m, s, {"lo"}) == doctest::Approx(log_normal(0.5, 0, 1) + std::log(0.5)));
  // two frames, one label: only the self loop path exists
  auto s2 = stream_1d({0.5, 1.0});
  CHECK(sequence_log_likelihood(m, s2, {"lo"}) ==
        doctest::Approx(log_normal(0.5, 0, 1) + log_normal(1.0, 0, 1) + 2 * std::log(0.5)));
}

TEST_CASE("weak learning clones the parent viseme") {
  std::vector<FeatureStream> train{stream_1d({0, 1, 2, 3})};
  ModelSet vis = flat_start({"v01", "v02", "gar", "sil"}, train);
  vis.models.at("v01").states[0].means = {42.0};
  P2VMap map("m", {{"v01", {"p", "b"}}, {"v02", {"aa"}}}, {"zh"}, {{"sil", {"sil"}}});
  ModelSet ph = weak_learn_init(vis, map, {"p", "b", "aa", "zh", "sil"});
  CHECK(ph.models.size() == 5);
  CHECK(ph.at("p").states == vis.at("v01").states);
  CHECK(ph.at("b").states == vis.at("v01").states);
  CHECK(ph.at("p").label == "p");
  CHECK(ph.at("zh").states == vis.at("gar").states);
  CHECK(ph.at("sil").states == vis.at("sil").states);
  CHECK_THROWS_AS(weak_learn_init(vis, map, {"xx"}), InputError);
  ModelSet partial = flat_start({"v01"}, train);
  CHECK_THROWS_AS(weak_learn_init(partial, map, {"aa"}), InputError);
}

TEST_CASE("model files round-trip") {
  std::vector<FeatureStream> train{stream_1d({0, 1, 2, 3, 7})};
  ProtoConfig proto;
  proto.mixtures = 3;
  proto.seed = 5;
  ModelSet m = flat_start({"a", "b"}, train, proto);
  std::stringstream ss;
  write_models(ss, m);
  ModelSet back = parse_models(ss);
  CHECK(back == m);
  std::istringstream bad("models 1 dim 1\nfloor 1\nmodel a states 1 mixtures 1\ntrans\n0 1\n");
  CHECK_THROWS_AS(parse_models(bad), ParseError);
}

TEST_CASE("feature streams round-trip through both formats") {
  FeatureStream s;
  s.id = "x";
  s.dim = 3;
  s.data = {0.5, -1.25, 3.0, 1e-3, 2.0, -7.75};
  std::stringstream csv;
  write_features_csv(csv, s);
  auto c = parse_features_csv(csv, "x");
  CHECK(c.dim == 3);
  CHECK(c.data == s.data);
  std::stringstream bin;
  write_features_binary(bin, s);
  const std::string bytes = bin.str();
  CHECK(bytes.size() == 16 + 6 * 4);
  CHECK(bytes.substr(0, 4) == "VLF1");
  auto b = read_features_binary(bin, "x");
  REQUIRE(b.data.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(b.data[i] == static_cast<double>(static_cast<float>(s.data[i])));
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(parse_features_csv(ragged, "r"), ParseError);
  std::istringstream truncated(bytes.substr(0, 20));
  CHECK_THROWS_AS(read_features_binary(truncated, "t"), ParseError);
}

TEST_CASE("bigram estimates") {
  std::vector<LabelSeq> corpus{{"a", "b"}, {"a", "b"}};
  auto net = build_bigram(corpus);
  const auto a = net.index_of("a"), b = net.index_of("b");
  CHECK(net.p(a, b) == 1.0);
  CHECK(net.p(a, a) == 0.0);
  CHECK(net.p_end(b) == 1.0);
  CHECK(net.start[a] == 1.0);

  auto floored = build_bigram(corpus, 0.01);
  for (std::size_t i = 0; i < floored.size(); ++i) {
    double row = 0;
    for (std::size_t j = 0; j <= floored.size(); ++j) row += floored.bigram[i * (floored.size() + 1) + j];
    CHECK(row == doctest::Approx(1.0));
  }
  // row a: counts {a:0, b:2, end:0} -> {0.01, 1, 0.01} / 1.02
  CHECK(floored.p(a, b) == doctest::Approx(1.0 / 1.02));
  CHECK(floored.p(a, a) == doctest::Approx(0.01 / 1.02));

  std::vector<LabelSeq> empty;
  CHECK_THROWS_AS(build_bigram(empty), InputError);
  CHECK_THROWS_AS(build_bigram(corpus, 0.0, {"a"}), InputError);
}

TEST_CASE("decoding a single-token network") {
  ModelSet m = two_models();
  std::vector<LabelSeq> corpus{{"lo"}};
  auto net = build_bigram(corpus);
  auto s = stream_1d({0.1, 0.2, -0.3});
  DecodeConfig cfg;
  auto r = decode(m, net, s, cfg);
  CHECK(r.tokens == LabelSeq{"lo"});
  double want = -cfg.transition_penalty + 3 * std::log(0.5);
  for (double x : {0.1, 0.2, -0.3}) want += log_normal(x, 0, 1);
  CHECK(r.score == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("decoding with no grammar follows the emissions") {
  ModelSet m = two_models();
  std::vector<LabelSeq> corpus{{"lo", "hi"}};
  auto net = build_bigram(corpus, 0.0, {"hi", "lo"});
  auto s = stream_1d({10.1, 9.7, 0.2, -0.1, 9.9, 10.2});
  DecodeConfig cfg;
  cfg.grammar_scale = 0.0;
  cfg.transition_penalty = 0.0;
  auto r = decode(m, net, s, cfg);
  CHECK(r.tokens == LabelSeq{"hi", "lo", "hi"});
  // with the grammar only lo -> hi is allowed
  cfg.grammar_scale = 1.0;
  auto g = decode(m, net, s, cfg);
  CHECK(g.tokens == LabelSeq{"lo", "hi"});
}

TEST_CASE("decoding through a lexicon") {
  ModelSet m = two_models();
  std::vector<LabelSeq> corpus{{"W1"}, {"W2"}};
  auto net = build_bigram(corpus);
  TokenLexicon lex{{"W1", {{"lo", "hi"}}}, {"W2", {{"hi", "lo"}}}};
  auto s = stream_1d({9.9, 10.1, 0.1, 0.0});
  DecodeConfig cfg;
  auto r = decode(m, net, s, cfg, lex);
  CHECK(r.tokens == LabelSeq{"W2"});
  FeatureStream empty;
  empty.dim = 1;
  CHECK_THROWS_AS(decode(m, net, empty, cfg, lex), InputError);
}
