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


#include "visemes/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

std::string_view to_string(Unit u) {
  switch (u) {
    case Unit::viseme: return "viseme";
    case Unit::phoneme: return "phoneme";
    case Unit::word: return "word";
  }
  return "?";
}

Unit parse_unit(std::string_view s) {
  if (s == "viseme") return Unit::viseme;
  if (s == "phoneme") return Unit::phoneme;
  if (s == "word") return Unit::word;
  throw InputError("unknown unit '" + std::string(s) + "' (viseme, phoneme or word)");
}

void check_pairing(Unit units, Unit network) {
  if (network == Unit::viseme && units != Unit::viseme)
    throw InputError(std::string(to_string(units)) + " units cannot use a viseme network");
  if (units == Unit::word && network != Unit::word) throw InputError("word units need a word network");
}

const StageResult& PipelineResult::stage(std::string_view name) const {
  for (const auto& s : stages)
    if (s.stage == name) return s;
  throw InputError("no pipeline stage " + std::string(name));
}

namespace {

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (fold + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Split {
  std::vector<std::size_t> train, test;
};

Split make_split(std::size_t n, std::size_t test_size, std::uint64_t seed, std::size_t fold) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(fold_seed(seed, fold));
  // Fisher-Yates by hand: std::shuffle is not portable across libraries.
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
  Split s;
  s.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(test_size));
  s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(test_size), idx.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Everything a fold needs, at every level, per utterance.
struct Data {
  const PlantedWorld* world;
  const Corpus* corpus;
  std::vector<LabelSeq> words, phonemes, visemes;
  std::vector<std::string> phoneme_labels, word_labels;
  PronDict vis_dict;
  const P2VMap* map = nullptr;
};

const std::vector<LabelSeq>& level(const Data& d, Unit u) {
  switch (u) {
    case Unit::viseme: return d.visemes;
    case Unit::phoneme: return d.phonemes;
    case Unit::word: return d.words;
  }
  return d.words;
}

std::vector<std::string> token_set(const Data& d, Unit u) {
  switch (u) {
    case Unit::viseme: return d.map->output_labels();
    case Unit::phoneme: return d.phoneme_labels;
    case Unit::word: return d.word_labels;
  }
  return {};
}

template <class T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

// Word models get proto.n_states states per phoneme of their first pronunciation.
void widen_word_models(ModelSet& m, const PronDict& dict, std::size_t per_phoneme) {
  for (auto& [word, h] : m.models) {
    const std::size_t n = per_phoneme * dict.lookup(word).front().size();
    HmmModel w;
    w.label = word;
    w.n_states = n;
    w.trans.assign((n + 2) * (n + 2), 0.0);
    w.a(0, 1) = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
      w.a(j, j) = 0.5;
      w.a(j, j + 1) = 0.5;
    }
    w.states.assign(n, h.states.front());
    h = std::move(w);
  }
}

ModelSet train_units(const Data& d, Unit units, const std::vector<std::size_t>& train, const PipelineConfig& cfg,
                     std::size_t fold) {
  auto streams = pick(d.corpus->streams, train);
  ProtoConfig proto = cfg.proto;
  proto.seed = fold_seed(cfg.seed ^ 0x9a0f, fold);
  ModelSet m = flat_start(token_set(d, units), streams, proto);
  if (units == Unit::word) widen_word_models(m, d.world->vocab, cfg.proto.n_states);
  std::vector<std::vector<LabelSeq>> variants;
  for (auto i : train) variants.push_back({level(d, units)[i]});
  reestimate(m, streams, variants, cfg.train);
  return m;
}

TokenLexicon lexicon_for(const Data& d, Unit units, Unit network) {
  TokenLexicon lex;
  if (units == network) return lex;
  if (network == Unit::phoneme)
    for (const auto& p : d.phoneme_labels) lex[p] = {{d.map->viseme_for(p)}};
  if (network == Unit::word) {
    const PronDict& dict = units == Unit::viseme ? d.vis_dict : d.world->vocab;
    for (const auto& [word, prons] : dict.entries()) lex[word] = prons;
  }
  return lex;
}

Alignment classify(const Data& d, const ModelSet& models, Unit units, Unit network, const Split& split,
                   const PipelineConfig& cfg) {
  auto net = build_bigram(pick(level(d, network), split.train), cfg.bigram_floor, token_set(d, network));
  auto lex = lexicon_for(d, units, network);
  std::vector<Alignment> parts;
  for (auto i : split.test) {
    auto hyp = decode(models, net, d.corpus->streams[i], cfg.decode, lex);
    parts.push_back(align(level(d, network)[i], hyp.tokens));
  }
  return merge(parts);
}

StageResult finish(std::string name, Unit units, Unit network, std::vector<Alignment> folds) {
  StageResult s;
  s.stage = std::move(name);
  s.units = units;
  s.network = network;
  std::vector<double> c, a;
  for (const auto& f : folds) {
    c.push_back(correctness(f));
    a.push_back(accuracy(f));
  }
  s.correctness = fold_stats(c);
  s.accuracy = fold_stats(a);
  s.folds = std::move(folds);
  return s;
}

}  // namespace

PipelineResult run_pipeline(const PlantedWorld& world, const PipelineConfig& cfg) {
  check_pairing(cfg.units, cfg.network);
  if (cfg.folds < 2) throw InputError("cross-validation needs at least 2 folds");
  const std::size_t test_size = cfg.test_size ? cfg.test_size : cfg.utterances / cfg.folds;
  if (test_size == 0 || test_size >= cfg.utterances)
    throw InputError("test size must leave both test and training utterances");

  Corpus corpus = generate(world, cfg.utterances);
  Data d;
  d.world = &world;
  d.corpus = &corpus;
  for (const auto& u : corpus.words.utterances()) d.words.push_back(u.labels);
  for (const auto& u : corpus.phonemes.utterances()) d.phonemes.push_back(u.labels);
  for (const auto& p : world.inventory.phonemes()) d.phoneme_labels.push_back(p.symbol);
  for (const auto& [word, prons] : world.vocab.entries()) d.word_labels.push_back(word);

  std::vector<Split> splits;
  for (std::size_t f = 0; f < cfg.folds; ++f) splits.push_back(make_split(cfg.utterances, test_size, cfg.seed, f));

  PipelineResult r;
  // Phoneme classification, whose confusions drive the map.
  std::vector<Alignment> phoneme_folds(cfg.folds);
  std::vector<std::vector<Alignment>> phoneme_parts(cfg.folds);
  parallel_for(cfg.folds, cfg.jobs, [&](std::size_t f) {
    auto models = train_units(d, Unit::phoneme, splits[f].train, cfg, f);
    auto net = build_bigram(pick(d.phonemes, splits[f].train), cfg.bigram_floor, d.phoneme_labels);
    for (auto i : splits[f].test) {
      auto hyp = decode(models, net, corpus.streams[i], cfg.decode);
      phoneme_parts[f].push_back(align(d.phonemes[i], hyp.tokens));
    }
    phoneme_folds[f] = merge(phoneme_parts[f]);
  });
  std::vector<Alignment> all;
  for (const auto& parts : phoneme_parts) all.insert(all.end(), parts.begin(), parts.end());
  r.confusion = build_from_alignments(all, d.phoneme_labels).matrix;
  r.stages.push_back(finish("phoneme", Unit::phoneme, Unit::phoneme, std::move(phoneme_folds)));

  if (cfg.map) {
    r.map = *cfg.map;
  } else {
    ClusterConfig cc = cfg.cluster;
    if (!cc.inventory) cc.inventory = world.inventory;
    r.map = cluster(r.confusion, cc);
  }
  for (const auto& p : d.phoneme_labels)
    if (!r.map.covers(p)) throw InputError("the map does not cover phoneme " + p);
  d.map = &r.map;
  for (const auto& ph : d.phonemes) d.visemes.push_back(phonemes_to_visemes(ph, r.map));
  d.vis_dict = viseme_dict(world.vocab, r.map);

  if (!cfg.classify) return r;
  const Unit weak_net = cfg.network == Unit::word ? Unit::word : Unit::phoneme;
  // The viseme stage of weak learning is the classify stage when the pairings agree.
  const bool reuse = cfg.weak_learn && cfg.units == Unit::viseme && cfg.network == weak_net;
  std::vector<Alignment> classify_folds(cfg.folds), vis_folds(cfg.folds), weak_folds(cfg.folds);
  parallel_for(cfg.folds, cfg.jobs, [&](std::size_t f) {
    auto models = train_units(d, cfg.units, splits[f].train, cfg, f);
    classify_folds[f] = classify(d, models, cfg.units, cfg.network, splits[f], cfg);
    if (!cfg.weak_learn) return;
    ModelSet vis;
    if (reuse) {
      vis = std::move(models);
      vis_folds[f] = classify_folds[f];
    } else {
      vis = train_units(d, Unit::viseme, splits[f].train, cfg, f);
      vis_folds[f] = classify(d, vis, Unit::viseme, weak_net, splits[f], cfg);
    }
    ModelSet ph = weak_learn_init(vis, r.map, d.phoneme_labels);
    auto streams = pick(corpus.streams, splits[f].train);
    std::vector<std::vector<LabelSeq>> variants;
    for (auto i : splits[f].train) variants.push_back({d.phonemes[i]});
    reestimate(ph, streams, variants, cfg.train);
    weak_folds[f] = classify(d, ph, Unit::phoneme, weak_net, splits[f], cfg);
  });
  r.stages.push_back(finish("classify", cfg.units, cfg.network, std::move(classify_folds)));
  if (cfg.weak_learn) {
    r.stages.push_back(finish("viseme-stage", Unit::viseme, weak_net, std::move(vis_folds)));
    r.stages.push_back(finish("weak-learned", Unit::phoneme, weak_net, std::move(weak_folds)));
  }
  return r;
}

void write_pipeline_csv(std::ostream& out, const PipelineResult& r, const std::string& provenance) {
  out << "# " << provenance << '\n';
  out << "stage,units,network,fold,n,deletions,substitutions,insertions,correctness,accuracy\n";
  for (const auto& s : r.stages) {
    const std::string head = s.stage + "," + std::string(to_string(s.units)) + "," + std::string(to_string(s.network));
    for (std::size_t f = 0; f < s.folds.size(); ++f) {
      const auto& a = s.folds[f];
      out << head << ',' << f + 1 << ',' << a.n << ',' << a.deletions << ',' << a.substitutions << ','
          << a.insertions << ',' << format_fixed(s.correctness.values[f], 6) << ','
          << format_fixed(s.accuracy.values[f], 6) << '\n';
    }
    out << head << ",mean,,,,," << format_fixed(s.correctness.mean, 6) << ',' << format_fixed(s.accuracy.mean, 6)
        << '\n';
    out << head << ",stderr,,,,," << format_fixed(s.correctness.stderr_, 6) << ','
        << format_fixed(s.accuracy.stderr_, 6) << '\n';
  }
}

}  // namespace visemes
