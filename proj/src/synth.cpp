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


#include "visemes/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> unit_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    std::vector<double> v(d);
    double len = 0;
    for (auto& x : v) {
      x = n(rng);
      len += x * x;
    }
    if (len < 1e-12) continue;
    len = std::sqrt(len);
    for (auto& x : v) x /= len;
    return v;
  }
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

void PlantedWorld::finalize() {
  if (dim == 0) throw InputError("world dimension must be positive");
  if (!(sigma > 0)) throw InputError("sigma must be positive");
  if (epsilon < 0) throw InputError("epsilon must be non-negative");
  if (separation < 0) throw InputError("separation must be non-negative");
  if (min_frames == 0 || min_frames > max_frames) throw InputError("need 0 < min_frames <= max_frames");
  if (min_words == 0 || min_words > max_words) throw InputError("need 0 < min_words <= max_words");
  if (planted.viseme_count() == 0) throw InputError("the planted map has no classes");
  if (vocab.empty()) throw InputError("the world vocabulary is empty");
  for (const auto& [word, prons] : vocab.entries())
    for (const auto& pron : prons)
      for (const auto& p : pron) {
        if (!inventory.contains(p)) throw InputError("word " + word + " uses '" + p + "', not in the inventory");
        auto v = planted.viseme_of(p);
        if (!v || !planted.find_class(*v))
          throw InputError("word " + word + " uses '" + p + "', not in a planted class");
      }

  std::mt19937_64 rng(mix_seed(seed, 0xba5e));
  base_means.clear();
  phoneme_means.clear();
  const auto& classes = planted.classes();
  const double scale = separation * sigma;
  if (dim >= classes.size()) {
    for (std::size_t i = 0; i < classes.size(); ++i) {
      std::vector<double> m(dim, 0.0);
      m[i] = scale / std::sqrt(2.0);
      base_means[classes[i].label] = m;
    }
  } else {
    const double box = scale * std::max(1.0, std::cbrt(static_cast<double>(classes.size())));
    std::uniform_real_distribution<double> u(-box, box);
    std::vector<std::vector<double>> placed;
    std::size_t tries = 0;
    while (placed.size() < classes.size()) {
      if (++tries > 1000000) throw InputError("cannot place viseme means that far apart in this dimension");
      std::vector<double> m(dim);
      for (auto& x : m) x = u(rng);
      bool ok = true;
      for (const auto& q : placed) ok &= distance(m, q) >= scale;
      if (ok) placed.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < classes.size(); ++i) base_means[classes[i].label] = placed[i];
  }
  for (const auto& c : classes)
    for (const auto& p : c.phonemes) {
      auto m = base_means[c.label];
      auto off = unit_vector(rng, dim);
      for (std::size_t k = 0; k < dim; ++k) m[k] += epsilon * sigma * off[k];
      phoneme_means[p] = std::move(m);
    }
}

PlantedWorld default_world(std::uint64_t seed, double epsilon, double separation) {
  PlantedWorld w;
  const std::vector<std::vector<std::string>> consonants{{"p", "b", "m"}, {"f", "v"}, {"t", "d"}, {"k", "g"}, {"s"}};
  const std::vector<std::vector<std::string>> vowels{{"aa", "ae"}, {"iy", "ih", "ey"}, {"uw"}};
  std::vector<VisemeClass> classes;
  std::vector<std::string> cs, vs;
  for (const auto& c : consonants) {
    classes.push_back({viseme_label(classes.size()), c});
    for (const auto& p : c) {
      w.inventory.add({p, PhonemeClass::consonant});
      cs.push_back(p);
    }
  }
  for (const auto& v : vowels) {
    classes.push_back({viseme_label(classes.size()), v});
    for (const auto& p : v) {
      w.inventory.add({p, PhonemeClass::vowel});
      vs.push_back(p);
    }
  }
  w.planted = P2VMap("planted", classes);
  w.planted.set_split(true);
  w.seed = seed;
  w.epsilon = epsilon;
  w.separation = separation;

  std::mt19937_64 rng(mix_seed(seed, 0x70c));
  std::set<Pronunciation> seen;
  // Every phoneme opens a word, then random CV syllables fill the rest.
  std::size_t i = 0;
  while (w.vocab.word_count() < 40) {
    Pronunciation pron;
    const std::size_t syllables = 1 + rng() % 2;
    for (std::size_t s = 0; s < syllables; ++s) {
      std::string c = cs[rng() % cs.size()], v = vs[rng() % vs.size()];
      if (s == 0 && i < cs.size()) c = cs[i];
      if (s == 0 && i < vs.size()) v = vs[i];
      pron.push_back(c);
      pron.push_back(v);
    }
    if (!seen.insert(pron).second) continue;
    std::string word = "W" + std::to_string(++i);
    if (word.size() < 3) word.insert(1, "0");
    w.vocab.add(word, pron);
  }
  w.finalize();
  return w;
}

namespace {

std::pair<std::string, std::string> key_value(std::string_view body, const std::string& source, std::size_t lineno) {
  auto colon = body.find(':');
  if (colon == std::string_view::npos) throw ParseError(source, lineno, "expected 'key: value'");
  return {std::string(trim(body.substr(0, colon))), std::string(trim(body.substr(colon + 1)))};
}

double to_number(const std::string& v, const std::string& source, std::size_t lineno) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw ParseError(source, lineno, "not a number: '" + v + "'");
}

std::size_t to_count(const std::string& v, const std::string& source, std::size_t lineno) {
  double d = to_number(v, source, lineno);
  if (d < 0 || d != std::floor(d)) throw ParseError(source, lineno, "not a count: '" + v + "'");
  return static_cast<std::size_t>(d);
}

}  // namespace

PlantedWorld parse_world(std::istream& in, const std::string& source) {
  PlantedWorld w;
  std::vector<VisemeClass> classes;
  std::string section, line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(source, lineno, "unterminated section header");
      section = std::string(body.substr(1, body.size() - 2));
      if (section != "world" && section != "inventory" && section != "map" && section != "vocab")
        throw ParseError(source, lineno, "unknown section [" + section + "]");
      continue;
    }
    auto [key, value] = key_value(body, source, lineno);
    try {
      if (section == "world") {
        if (key == "dim") w.dim = to_count(value, source, lineno);
        else if (key == "separation") w.separation = to_number(value, source, lineno);
        else if (key == "sigma") w.sigma = to_number(value, source, lineno);
        else if (key == "epsilon") w.epsilon = to_number(value, source, lineno);
        else if (key == "min_frames") w.min_frames = to_count(value, source, lineno);
        else if (key == "max_frames") w.max_frames = to_count(value, source, lineno);
        else if (key == "min_words") w.min_words = to_count(value, source, lineno);
        else if (key == "max_words") w.max_words = to_count(value, source, lineno);
        else if (key == "seed") w.seed = to_count(value, source, lineno);
        else throw ParseError(source, lineno, "unknown world key '" + key + "'");
      } else if (section == "inventory") {
        auto klass = parse_phoneme_class(value);
        if (!klass) throw ParseError(source, lineno, "unknown phoneme class '" + value + "'");
        w.inventory.add({key, *klass});
      } else if (section == "map") {
        classes.push_back({key, split_ws(value)});
      } else if (section == "vocab") {
        w.vocab.add(key, split_ws(value));
      } else {
        throw ParseError(source, lineno, "entry outside a section");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  try {
    w.planted = P2VMap("planted", classes);
    w.finalize();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, lineno, e.what());
  }
  return w;
}

PlantedWorld load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open world file " + path.string());
  return parse_world(in, path.string());
}

void write_world(std::ostream& out, const PlantedWorld& w) {
  out << "[world]\n"
      << "dim: " << w.dim << "\nseparation: " << format_double(w.separation) << "\nsigma: " << format_double(w.sigma)
      << "\nepsilon: " << format_double(w.epsilon) << "\nmin_frames: " << w.min_frames
      << "\nmax_frames: " << w.max_frames << "\nmin_words: " << w.min_words << "\nmax_words: " << w.max_words
      << "\nseed: " << w.seed << "\n\n[inventory]\n";
  for (const auto& p : w.inventory.phonemes()) out << p.symbol << ": " << to_string(p.klass) << '\n';
  out << "\n[map]\n";
  for (const auto& c : w.planted.classes()) out << c.label << ": " << join(c.phonemes, " ") << '\n';
  out << "\n[vocab]\n";
  for (const auto& [word, prons] : w.vocab.entries())
    for (const auto& p : prons) out << word << ": " << join(p, " ") << '\n';
}

Corpus generate(const PlantedWorld& world, std::size_t n_utterances) {
  if (world.phoneme_means.empty()) throw InputError("world is not finalized");
  Corpus c;
  std::vector<std::string> words;
  for (const auto& [word, prons] : world.vocab.entries()) words.push_back(word);
  for (std::size_t u = 0; u < n_utterances; ++u) {
    std::mt19937_64 rng(mix_seed(world.seed, u + 1));
    std::uniform_int_distribution<std::size_t> n_words(world.min_words, world.max_words);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<std::size_t> frames(world.min_frames, world.max_frames);
    std::normal_distribution<double> noise(0.0, world.sigma);
    Utterance wu, pu;
    wu.id = pu.id = "u" + std::string(std::to_string(u + 1).size() < 4 ? 4 - std::to_string(u + 1).size() : 0, '0') +
                    std::to_string(u + 1);
    wu.fold = pu.fold = "0";
    FeatureStream s;
    s.id = wu.id;
    s.dim = world.dim;
    const std::size_t n = n_words(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& word = words[pick(rng)];
      wu.labels.push_back(word);
      for (const auto& p : world.vocab.lookup(word).front()) {
        pu.labels.push_back(p);
        const auto& mean = world.phoneme_means.at(p);
        const std::size_t len = frames(rng);
        for (std::size_t t = 0; t < len; ++t)
          for (std::size_t k = 0; k < world.dim; ++k) s.data.push_back(mean[k] + noise(rng));
      }
    }
    c.words.add(std::move(wu));
    c.phonemes.add(std::move(pu));
    c.streams.push_back(std::move(s));
  }
  return c;
}

Corpus generate(const PlantedWorld& world, std::size_t n_utterances, const PronDict& vocab) {
  if (vocab.empty()) throw InputError("the vocabulary is empty");
  for (const auto& [word, prons] : vocab.entries())
    for (const auto& pron : prons)
      for (const auto& p : pron)
        if (!world.phoneme_means.count(p)) throw InputError("word " + word + " uses '" + p + "', not in the world");
  PlantedWorld w = world;
  w.vocab = vocab;
  return generate(w, n_utterances);
}

double variation_of_information(const P2VMap& a, const P2VMap& b) {
  std::set<std::string> elements;
  for (const auto& p : a.class_phonemes()) elements.insert(p);
  for (const auto& p : b.class_phonemes()) elements.insert(p);
  if (elements.empty()) return 0.0;
  auto block = [](const P2VMap& m, const std::string& p) {
    for (const auto& c : m.classes())
      if (std::find(c.phonemes.begin(), c.phonemes.end(), p) != c.phonemes.end()) return c.label;
    return "#" + p;
  };
  std::map<std::string, double> na, nb;
  std::map<std::pair<std::string, std::string>, double> nab;
  for (const auto& p : elements) {
    auto x = block(a, p), y = block(b, p);
    na[x] += 1;
    nb[y] += 1;
    nab[{x, y}] += 1;
  }
  const double n = static_cast<double>(elements.size());
  double vi = 0;
  for (const auto& [xy, c] : nab) {
    const double pxy = c / n;
    vi -= pxy * (std::log(pxy / (na[xy.first] / n)) + std::log(pxy / (nb[xy.second] / n)));
  }
  return std::max(0.0, vi);
}

double plant_recovery_check(const PlantedWorld& world, const P2VMap& derived) {
  return variation_of_information(world.planted, derived);
}

}  // namespace visemes
