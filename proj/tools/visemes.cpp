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


#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "visemes/catalog.hpp"
#include "visemes/clustering.hpp"
#include "visemes/confusion.hpp"
#include "visemes/error.hpp"
#include "visemes/lexicon.hpp"
#include "visemes/mapsim.hpp"
#include "visemes/p2vmap.hpp"
#include "visemes/pipeline.hpp"
#include "visemes/scoring.hpp"
#include "visemes/synth.hpp"
#include "visemes/text.hpp"

namespace fs = std::filesystem;
using namespace visemes;

namespace {

// Bad flag combinations found after parsing.
struct UsageError : Error {
  using Error::Error;
};

std::string provenance(std::uint64_t seed, const std::vector<std::string>& inputs) {
  std::string s = std::string("visemes ") + VISEMES_VERSION + " seed=" + std::to_string(seed) + " inputs=";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) s += ',';
    s += fs::path(inputs[i]).filename().string() + ":" + file_digest(inputs[i]);
  }
  if (inputs.empty()) s += "none";
  return s;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

std::string map_text(const P2VMap& m) {
  std::ostringstream out;
  write_map(out, m);
  return out.str();
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  auto number = [&](std::string_view v) {
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || p != v.data() + v.size()) throw UsageError("bad size list '" + s + "'");
    return n;
  };
  if (auto dots = s.find(".."); dots != std::string::npos) {
    const auto hi = number(std::string_view(s).substr(0, dots));
    const auto lo = number(std::string_view(s).substr(dots + 2));
    if (lo > hi) throw UsageError("size range must run from high to low: '" + s + "'");
    for (std::size_t n = hi; n >= lo && n > 0; --n) out.push_back(n);
  } else {
    for (const auto& part : split(s, ',')) out.push_back(number(trim(part)));
  }
  return out;
}

Inventory inventory_from(const std::string& path) { return path.empty() ? default_inventory() : Inventory::load(path); }

// ---- derive

struct DeriveArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> maps;
  std::string out_dir = ".";
  std::string name = "derived";
  std::string inventory;
  std::string sizes;
  std::string hold_out;
  std::string tie_break = "lexicographic";
  bool strict = false, relaxed = false, common_pair = false, controlled = false, split = false;
  std::uint64_t seed = 0;
};

int cmd_derive(const DeriveArgs& a) {
  const int algorithms = a.strict + a.relaxed + a.common_pair + (a.controlled || !a.sizes.empty());
  if (algorithms > 1) throw UsageError("choose one of --strict, --relaxed, --common-pair, --controlled");
  std::ostringstream log;
  log << "visemes " << VISEMES_VERSION << '\n';
  const fs::path out_dir = a.out_dir;

  if (a.common_pair) {
    if (a.maps.size() < 2) throw UsageError("--common-pair needs at least two --map inputs");
    std::vector<P2VMap> maps;
    for (const auto& m : a.maps) maps.push_back(load_map(m));
    auto result = common_pair_cluster(maps, a.name);
    result.set_provenance(provenance(a.seed, a.maps));
    log << "algorithm common-pair\n";
    for (const auto& m : a.maps) log << "input " << m << ' ' << file_digest(m) << '\n';
    write_text(out_dir / (a.name + ".p2v"), map_text(result));
    write_text(out_dir / "derive.log", log.str());
    return 0;
  }

  if (a.inputs.empty()) throw UsageError("derive needs at least one --input confusion matrix");
  ClusterConfig cfg;
  cfg.mode = a.relaxed ? ClusterMode::relaxed : ClusterMode::strict;
  cfg.vc_policy = a.split ? VcPolicy::split : VcPolicy::mixed;
  if (a.tie_break == "seeded") cfg.tie_break = TieBreak::seeded_random;
  else if (a.tie_break != "lexicographic") throw UsageError("--tie-break is lexicographic or seeded");
  cfg.seed = a.seed;
  cfg.name = a.name;
  if (a.split || !a.inventory.empty()) cfg.inventory = inventory_from(a.inventory);
  if (!a.sizes.empty()) cfg.target_sizes = parse_sizes(a.sizes);

  std::vector<std::pair<std::string, ConfusionMatrix>> speakers;
  for (const auto& in : a.inputs) speakers.emplace_back(fs::path(in).stem().string(), load_confusion_csv(in));

  const bool controlled = a.controlled || !a.sizes.empty();
  log << "algorithm " << (controlled ? "controlled" : a.relaxed ? "relaxed" : "strict") << '\n'
      << "vc_policy " << (a.split ? "split" : "mixed") << '\n'
      << "tie_break " << a.tie_break << "\nseed " << a.seed << '\n';
  if (!a.sizes.empty()) log << "sizes " << a.sizes << '\n';
  if (!a.hold_out.empty()) log << "hold_out " << a.hold_out << '\n';
  for (const auto& in : a.inputs) log << "input " << in << ' ' << file_digest(in) << '\n';
  const std::string prov = provenance(a.seed, a.inputs);

  if (controlled) {
    std::vector<ConfusionMatrix> ks;
    for (const auto& [id, k] : speakers)
      if (id != a.hold_out) ks.push_back(k);
    if (!a.hold_out.empty() && ks.size() == speakers.size()) throw InputError("unknown hold-out " + a.hold_out);
    auto result = controlled_merge(accumulate(ks), cfg);
    for (const auto& step : result.steps)
      log << "merge size " << step.size_after << " q " << format_double(step.q) << " {" << join(step.merged_a, " ")
          << "} + {" << join(step.merged_b, " ") << "}\n";
    for (const auto& w : result.warnings) log << "warning " << w << '\n';
    for (auto m : result.maps) {
      m.set_provenance(prov);
      write_text(out_dir / (m.name() + ".p2v"), map_text(m));
      log << "wrote " << m.name() << ".p2v " << m.viseme_count() << " visemes\n";
    }
    write_text(out_dir / "derive.log", log.str());
    return 0;
  }

  P2VMap result;
  if (speakers.size() == 1 && a.hold_out.empty()) {
    result = cluster(speakers.front().second, cfg);
  } else {
    result = derive_ms_si(speakers, a.hold_out.empty() ? std::nullopt : std::optional(a.hold_out), cfg);
  }
  result.set_name(a.name);
  result.set_provenance(prov);
  write_text(out_dir / (a.name + ".p2v"), map_text(result));
  log << "wrote " << a.name << ".p2v " << result.viseme_count() << " visemes\n";
  write_text(out_dir / "derive.log", log.str());
  return 0;
}

// ---- report

struct ReportArgs {
  std::vector<std::string> maps;
  bool catalog = false;
  std::string dict;
  std::string inventory;
  std::string out_dir = ".";
};

int cmd_report(const ReportArgs& a) {
  std::vector<P2VMap> maps;
  std::vector<std::string> inputs = a.maps;
  if (a.catalog)
    for (const auto& e : load_catalog()) maps.push_back(e.map);
  for (const auto& m : a.maps) maps.push_back(load_map(m));
  if (maps.empty()) throw UsageError("report needs --map files or --catalog");
  if (!a.dict.empty()) inputs.push_back(a.dict);
  const std::string prov = provenance(0, inputs);
  const fs::path out_dir = a.out_dir;

  std::ostringstream cf;
  cf << "# " << prov << "\nmap,visemes,phonemes,cf\n";
  for (const auto& m : maps)
    cf << m.name() << ',' << m.viseme_count() << ',' << m.phoneme_count() << ','
       << format_fixed(compression_factor(m), 4) << '\n';
  write_text(out_dir / "cf.csv", cf.str());

  if (maps.size() >= 2) {
    // Maps over disjoint phoneme sets (a consonant and a vowel map) have no score.
    std::ostringstream sim;
    sim << "# " << prov << "\nmap";
    for (const auto& m : maps) sim << ',' << m.name();
    sim << '\n';
    for (const auto& a : maps) {
      sim << a.name();
      for (const auto& b : maps) {
        std::string cell = "NA";
        try {
          cell = format_fixed(similarity(a, b).score, 3);
        } catch (const InputError&) {
        }
        sim << ',' << cell;
      }
      sim << '\n';
    }
    write_text(out_dir / "similarity.csv", sim.str());
  }

  if (!a.dict.empty()) {
    const Inventory inv = inventory_from(a.inventory);
    const PronDict dict = load_dict(a.dict, inv);
    std::ostringstream hom;
    hom << "# " << prov << "\nmap,words,tokens,homophone_words,largest_group,baseline\n";
    std::vector<std::string> skipped;
    for (const auto& m : maps) {
      bool covered = true;
      for (const auto& [word, prons] : dict.entries())
        for (const auto& pron : prons)
          for (const auto& p : pron) covered &= m.covers(p);
      if (!covered) {
        skipped.push_back(m.name());
        continue;
      }
      auto report = homophone_tokens(viseme_dict(dict, m));
      std::vector<std::size_t> counts;
      std::size_t words = 0, shared = 0, largest = 0;
      for (const auto& [token, group] : report.groups) {
        counts.push_back(group.size());
        words += group.size();
        if (group.size() > 1) shared += group.size();
        largest = std::max(largest, group.size());
      }
      hom << m.name() << ',' << words << ',' << report.tokens << ',' << shared << ',' << largest << ','
          << format_fixed(guessing_baseline(counts, words, report.tokens), 6) << '\n';
    }
    if (!skipped.empty()) hom << "# not covering the dictionary: " << join(skipped, " ") << '\n';
    write_text(out_dir / "homophones.csv", hom.str());
  }
  return 0;
}

// ---- sim

struct SimArgs {
  std::vector<std::string> maps;
  std::string out;
};

int cmd_sim(const SimArgs& a) {
  if (a.maps.size() < 2) throw UsageError("sim needs at least two maps");
  std::vector<P2VMap> maps;
  for (const auto& m : a.maps) maps.push_back(load_map(m));
  const std::string prov = provenance(0, a.maps);
  std::ostringstream out;
  if (maps.size() == 2) {
    auto r = similarity(maps[0], maps[1]);
    out << "# " << prov << "\nclass_a,class_b,weight\n";
    for (const auto& c : r.match_table) out << c.class_a << ',' << c.class_b << ',' << format_fixed(c.weight, 6) << '\n';
    out << "# upper=" << format_fixed(r.upper, 6) << " lower=" << format_fixed(r.lower, 6)
        << " matched=" << r.matched_phonemes << " score=" << format_fixed(r.score, 6) << '\n';
    std::cout << maps[0].name() << ' ' << maps[1].name() << ' ' << format_fixed(r.score, 6) << '\n';
  } else {
    write_similarity_csv(out, maps, similarity_matrix(maps), prov);
  }
  if (!a.out.empty()) write_text(a.out, out.str());
  else if (maps.size() > 2) std::cout << out.str();
  return 0;
}

// ---- score

struct ScoreArgs {
  std::string ref, hyp, out, level = "word";
  bool htk = false;
};

int cmd_score(const ScoreArgs& a) {
  const Level level = parse_level(a.level);
  const Transcript ref = load_transcript(a.ref, level);
  const Transcript hyp = load_transcript(a.hyp, level);
  EditCosts costs;
  if (a.htk) costs = {10, 7, 7};
  std::ostringstream out;
  out << "# " << provenance(0, {a.ref, a.hyp}) << "\nid,n,deletions,substitutions,insertions,correctness,accuracy\n";
  std::vector<Alignment> all;
  for (const auto& u : ref.utterances()) {
    const Utterance* h = hyp.find(u.id);
    if (!h) throw InputError("hypothesis has no utterance " + u.id);
    auto al = align(u.labels, h->labels, costs);
    out << u.id << ',' << al.n << ',' << al.deletions << ',' << al.substitutions << ',' << al.insertions << ','
        << format_fixed(correctness(al), 6) << ',' << format_fixed(accuracy(al), 6) << '\n';
    all.push_back(std::move(al));
  }
  for (const auto& u : hyp.utterances())
    if (!ref.find(u.id)) throw InputError("reference has no utterance " + u.id);
  auto total = merge(all);
  out << "total," << total.n << ',' << total.deletions << ',' << total.substitutions << ',' << total.insertions << ','
      << format_fixed(correctness(total), 6) << ',' << format_fixed(accuracy(total), 6) << '\n';
  if (a.out.empty()) std::cout << out.str();
  else write_text(a.out, out.str());
  return 0;
}

// ---- catalog

struct CatalogArgs {
  std::string dir;
  std::string show;
  std::string out;
};

int cmd_catalog(const CatalogArgs& a) {
  const auto catalog = load_catalog(a.dir);
  std::ostringstream out;
  if (!a.show.empty()) {
    write_map(out, catalog_entry(catalog, a.show).map);
  } else {
    out << "# visemes " << VISEMES_VERSION << " seed=0 inputs=catalog\nmap,kind,visemes,phonemes,cf\n";
    for (const auto& e : catalog)
      out << e.map.name() << ',' << to_string(e.kind) << ',' << e.map.viseme_count() << ',' << e.map.phoneme_count()
          << ',' << format_fixed(compression_factor(e.map), 4) << '\n';
  }
  if (a.out.empty()) std::cout << out.str();
  else write_text(a.out, out.str());
  return 0;
}

// ---- pipeline

struct PipelineArgs {
  std::string world;
  std::string map;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double epsilon = 0.0;
  double separation = 6.0;
  std::size_t utterances = 200, folds = 10, test_size = 0, passes = 11, align_at = 7, states = 3, mixtures = 1;
  std::size_t jobs = 1;
  std::string units = "viseme", network = "phoneme";
  bool weak_learn = false, relaxed = false, mixed = false;
  double grammar_scale = 1.0, penalty = 0.5, bigram_floor = 0.0;
};

int cmd_pipeline(const PipelineArgs& a) {
  PipelineConfig cfg;
  cfg.units = parse_unit(a.units);
  cfg.network = parse_unit(a.network);
  try {
    check_pairing(cfg.units, cfg.network);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  if (a.folds < 2) throw UsageError("--folds must be at least 2");
  PlantedWorld world;
  std::vector<std::string> inputs;
  if (!a.world.empty()) {
    world = load_world(a.world);
    inputs.push_back(a.world);
  } else {
    world = default_world(a.seed, a.epsilon, a.separation);
  }
  if (!a.map.empty()) {
    cfg.map = load_map(a.map);
    inputs.push_back(a.map);
  }
  cfg.utterances = a.utterances;
  cfg.folds = a.folds;
  cfg.test_size = a.test_size;
  cfg.weak_learn = a.weak_learn;
  cfg.proto.n_states = a.states;
  cfg.proto.mixtures = a.mixtures;
  cfg.train.passes = a.passes;
  if (a.align_at && a.align_at < a.passes) cfg.train.align_at = a.align_at;
  else cfg.train.align_at.reset();
  cfg.decode.grammar_scale = a.grammar_scale;
  cfg.decode.transition_penalty = a.penalty;
  cfg.bigram_floor = a.bigram_floor;
  cfg.cluster.mode = a.relaxed ? ClusterMode::relaxed : ClusterMode::strict;
  cfg.cluster.vc_policy = a.mixed ? VcPolicy::mixed : VcPolicy::split;
  cfg.cluster.name = "pipeline";
  cfg.jobs = a.jobs;
  cfg.seed = a.seed;

  auto r = run_pipeline(world, cfg);
  const std::string prov = provenance(a.seed, inputs);
  const fs::path out_dir = a.out_dir;
  std::ostringstream results;
  write_pipeline_csv(results, r, prov);
  write_text(out_dir / "results.csv", results.str());
  std::ostringstream conf;
  conf << "# " << prov << '\n';
  write_confusion_csv(conf, r.confusion);
  write_text(out_dir / "confusion.csv", conf.str());
  P2VMap map = r.map;
  map.set_provenance(prov + " recovery=" + format_fixed(plant_recovery_check(world, map), 6));
  write_text(out_dir / "derived.p2v", map_text(map));
  std::ostringstream w;
  write_world(w, world);
  write_text(out_dir / "world.txt", w.str());
  for (const auto& s : r.stages)
    std::cout << s.stage << ' ' << to_string(s.units) << '/' << to_string(s.network)
              << " C=" << format_fixed(s.correctness.mean, 4) << " +- " << format_fixed(s.correctness.stderr_, 4)
              << " A=" << format_fixed(s.accuracy.mean, 4) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phoneme-to-viseme map derivation, comparison and scoring"};
  app.set_version_flag("--version", std::string(VISEMES_VERSION));
  app.require_subcommand(1);

  DeriveArgs derive;
  auto* d = app.add_subcommand("derive", "Derive viseme maps from confusion matrices");
  d->add_option("-i,--input", derive.inputs, "Confusion matrix CSV (several are summed)");
  d->add_option("-m,--map", derive.maps, "Input map for --common-pair");
  d->add_option("-o,--out", derive.out_dir, "Output directory");
  d->add_option("--name", derive.name, "Name of the derived map");
  d->add_option("--inventory", derive.inventory, "Phoneme inventory (default: British English)");
  d->add_option("--sizes", derive.sizes, "Controlled sizes, e.g. 45..2 or 10,8,6");
  d->add_option("--hold-out", derive.hold_out, "Speaker (input file stem) left out");
  d->add_option("--tie-break", derive.tie_break, "lexicographic or seeded");
  d->add_option("--seed", derive.seed, "Seed for seeded tie-breaking");
  d->add_flag("--strict", derive.strict, "Strictly-confused clustering (default)");
  d->add_flag("--relaxed", derive.relaxed, "Strict then relaxed clustering");
  d->add_flag("--common-pair", derive.common_pair, "Common-pair clustering of --map inputs");
  d->add_flag("--controlled", derive.controlled, "Controlled-size merging");
  d->add_flag("--split", derive.split, "Keep vowels and consonants apart");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Compression factors, similarity and homophones");
  r->add_option("-m,--map", report.maps, "Map files");
  r->add_flag("--catalog", report.catalog, "Include the built-in catalog");
  r->add_option("--dict", report.dict, "Pronunciation dictionary for homophone counts");
  r->add_option("--inventory", report.inventory, "Phoneme inventory (default: British English)");
  r->add_option("-o,--out", report.out_dir, "Output directory");

  SimArgs sim;
  auto* s = app.add_subcommand("sim", "Similarity score of two or more maps");
  s->add_option("maps", sim.maps, "Map files")->required();
  s->add_option("-o,--out", sim.out, "Output CSV");

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Correctness and accuracy of hypotheses");
  sc->add_option("--ref", score.ref, "Reference transcript")->required();
  sc->add_option("--hyp", score.hyp, "Hypothesis transcript")->required();
  sc->add_option("--level", score.level, "word, phoneme or viseme");
  sc->add_flag("--htk", score.htk, "HTK alignment costs (sub 10, ins 7, del 7)");
  sc->add_option("-o,--out", score.out, "Output CSV");

  CatalogArgs catalog;
  auto* c = app.add_subcommand("catalog", "List or print catalog maps");
  c->add_option("--dir", catalog.dir, "Catalog directory");
  c->add_option("--show", catalog.show, "Print one map");
  c->add_option("-o,--out", catalog.out, "Output file");

  PipelineArgs pipe;
  auto* p = app.add_subcommand("pipeline", "Synthetic end-to-end classification experiment");
  p->add_option("--world", pipe.world, "World file (default: built-in world)");
  p->add_option("--map", pipe.map, "Use this map instead of deriving one");
  p->add_option("-o,--out", pipe.out_dir, "Output directory");
  p->add_option("--seed", pipe.seed, "Seed");
  p->add_option("--epsilon", pipe.epsilon, "Within-viseme spread of the built-in world");
  p->add_option("--separation", pipe.separation, "Viseme separation of the built-in world, in sigmas");
  p->add_option("--utterances", pipe.utterances, "Corpus size");
  p->add_option("--folds", pipe.folds, "Number of random splits");
  p->add_option("--test-size", pipe.test_size, "Test utterances per fold (default utterances/folds)");
  p->add_option("--units", pipe.units, "Classifier units: viseme, phoneme or word");
  p->add_option("--network", pipe.network, "Network units: viseme, phoneme or word");
  p->add_flag("--weak-learn", pipe.weak_learn, "Also train weak-learned phoneme models");
  p->add_option("--passes", pipe.passes, "Re-estimation passes");
  p->add_option("--align-at", pipe.align_at, "Realign after this pass (0: never)");
  p->add_option("--states", pipe.states, "Emitting states per model");
  p->add_option("--mixtures", pipe.mixtures, "Gaussians per state");
  p->add_option("--grammar-scale", pipe.grammar_scale, "Grammar scale factor");
  p->add_option("--penalty", pipe.penalty, "Transition penalty");
  p->add_option("--bigram-floor", pipe.bigram_floor, "Bigram probability floor");
  p->add_flag("--relaxed", pipe.relaxed, "Relaxed clustering");
  p->add_flag("--mixed", pipe.mixed, "Allow classes mixing vowels and consonants");
  p->add_option("--jobs", pipe.jobs, "Folds run in parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (*d) return cmd_derive(derive);
    if (*r) return cmd_report(report);
    if (*s) return cmd_sim(sim);
    if (*sc) return cmd_score(score);
    if (*c) return cmd_catalog(catalog);
    if (*p) return cmd_pipeline(pipe);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
