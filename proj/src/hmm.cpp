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


#include "visemes/hmm.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAbsoluteFloor = 1e-6;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace

double Gmm::component_log_probs(std::span<const double> x, std::vector<double>& out) const {
  const std::size_t d = dim();
  out.resize(mixtures());
  double total = kNegInf;
  for (std::size_t m = 0; m < mixtures(); ++m) {
    if (weights[m] <= 0) {
      out[m] = kNegInf;
      continue;
    }
    const double* mu = means.data() + m * d;
    const double* var = vars.data() + m * d;
    double s = std::log(weights[m]) - 0.5 * static_cast<double>(d) * std::log(2 * std::numbers::pi);
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = x[k] - mu[k];
      s -= 0.5 * (std::log(var[k]) + diff * diff / var[k]);
    }
    out[m] = s;
    total = log_add(total, s);
  }
  return total;
}

double Gmm::log_prob(std::span<const double> x) const {
  thread_local std::vector<double> scratch;
  return component_log_probs(x, scratch);
}

const HmmModel& ModelSet::at(const std::string& label) const {
  auto it = models.find(label);
  if (it == models.end()) throw InputError("no model for label '" + label + "'");
  return it->second;
}

std::vector<std::string> ModelSet::labels() const {
  std::vector<std::string> out;
  for (const auto& [l, m] : models) out.push_back(l);
  return out;
}

ModelSet flat_start(const std::vector<std::string>& labels, std::span<const FeatureStream> train,
                    const ProtoConfig& proto) {
  if (labels.empty()) throw InputError("flat start needs at least one label");
  if (train.empty()) throw InputError("flat start needs training data");
  if (proto.n_states == 0 || proto.mixtures == 0) throw InputError("models need at least one state and mixture");
  const std::size_t d = train.front().dim;
  if (d == 0) throw InputError("feature dimension is zero");
  std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
  double n = 0;
  for (const auto& s : train) {
    if (s.dim != d)
      throw InputError("stream '" + s.id + "' has dimension " + std::to_string(s.dim) + ", expected " +
                       std::to_string(d));
    for (std::size_t t = 0; t < s.frames(); ++t) {
      auto f = s.frame(t);
      for (std::size_t k = 0; k < d; ++k) {
        sum[k] += f[k];
        sumsq[k] += f[k] * f[k];
      }
      n += 1;
    }
  }
  if (n == 0) throw InputError("training data has no frames");

  ModelSet set;
  set.dim = d;
  set.var_floor.resize(d);
  std::vector<double> mean(d), var(d);
  for (std::size_t k = 0; k < d; ++k) {
    mean[k] = sum[k] / n;
    const double v = std::max(0.0, sumsq[k] / n - mean[k] * mean[k]);
    set.var_floor[k] = std::max(proto.floor_scale * v, kAbsoluteFloor);
    var[k] = std::max(v, set.var_floor[k]);
  }

  Gmm g;
  g.weights.assign(proto.mixtures, 1.0 / static_cast<double>(proto.mixtures));
  std::mt19937_64 rng(proto.seed);
  for (std::size_t m = 0; m < proto.mixtures; ++m)
    for (std::size_t k = 0; k < d; ++k) {
      double shift = 0;
      if (m > 0) shift = (rng() & 1 ? 0.1 : -0.1) * std::sqrt(var[k]);
      g.means.push_back(mean[k] + shift);
      g.vars.push_back(var[k]);
    }

  const std::size_t n_states = proto.n_states;
  for (const auto& label : labels) {
    HmmModel h;
    h.label = label;
    h.n_states = n_states;
    h.trans.assign((n_states + 2) * (n_states + 2), 0.0);
    h.a(0, 1) = 1.0;
    for (std::size_t j = 1; j <= n_states; ++j) {
      h.a(j, j) = 0.5;
      h.a(j, j + 1) = 0.5;
    }
    h.states.assign(n_states, g);
    set.models[label] = std::move(h);
  }
  return set;
}

ModelSet weak_learn_init(const ModelSet& visemes, const P2VMap& map, const std::vector<std::string>& phonemes) {
  ModelSet out;
  out.dim = visemes.dim;
  out.var_floor = visemes.var_floor;
  for (const auto& p : phonemes) {
    auto parent = map.viseme_of(p);
    if (!parent) throw InputError("phoneme '" + p + "' is not covered by map '" + map.name() + "'");
    auto it = visemes.models.find(*parent);
    if (it == visemes.models.end())
      throw InputError("no parent model '" + *parent + "' for phoneme '" + p + "'");
    HmmModel clone = it->second;
    clone.label = p;
    out.models[p] = std::move(clone);
  }
  return out;
}

void write_models(std::ostream& out, const ModelSet& m) {
  auto row = [&](const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out << (i ? " " : "") << format_double(v[i]);
    out << '\n';
  };
  out << "models " << m.models.size() << " dim " << m.dim << '\n';
  out << "floor ";
  row(m.var_floor.data(), m.var_floor.size());
  for (const auto& [label, h] : m.models) {
    out << "model " << label << " states " << h.n_states << " mixtures "
        << (h.states.empty() ? 0 : h.states.front().mixtures()) << '\n';
    for (std::size_t i = 0; i < h.n_states + 2; ++i) {
      out << "trans ";
      row(h.trans.data() + i * (h.n_states + 2), h.n_states + 2);
    }
    for (std::size_t j = 0; j < h.n_states; ++j) {
      const auto& g = h.states[j];
      for (std::size_t k = 0; k < g.mixtures(); ++k) {
        out << "mix " << j + 1 << ' ' << k + 1 << ' ' << format_double(g.weights[k]) << '\n';
        out << "mean ";
        row(g.means.data() + k * m.dim, m.dim);
        out << "var ";
        row(g.vars.data() + k * m.dim, m.dim);
      }
    }
  }
}

namespace {

class ModelReader {
 public:
  ModelReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::vector<std::string> line(const std::string& keyword) {
    std::string text;
    while (std::getline(in_, text)) {
      ++lineno_;
      auto f = split_ws(strip_comment(text));
      if (f.empty()) continue;
      if (f.front() != keyword) fail("expected '" + keyword + "', got '" + f.front() + "'");
      f.erase(f.begin());
      return f;
    }
    fail("unexpected end of file, expected '" + keyword + "'");
  }

  std::vector<double> numbers(const std::string& keyword, std::size_t n) {
    auto f = line(keyword);
    if (f.size() != n) fail("expected " + std::to_string(n) + " values after '" + keyword + "'");
    std::vector<double> out;
    for (const auto& s : f) out.push_back(number(s));
    return out;
  }

  double number(const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) fail("not a number: '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("not a number: '" + s + "'");
    }
  }

  std::size_t count(const std::string& s) {
    double v = number(s);
    if (v < 0 || v != std::floor(v)) fail("not a count: '" + s + "'");
    return static_cast<std::size_t>(v);
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(source_, lineno_, what); }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t lineno_ = 0;
};

}  // namespace

ModelSet parse_models(std::istream& in, const std::string& source) {
  ModelReader r(in, source);
  auto head = r.line("models");
  if (head.size() != 3 || head[1] != "dim") r.fail("expected 'models N dim D'");
  const std::size_t n_models = r.count(head[0]);
  ModelSet m;
  m.dim = r.count(head[2]);
  m.var_floor = r.numbers("floor", m.dim);
  for (std::size_t i = 0; i < n_models; ++i) {
    auto f = r.line("model");
    if (f.size() != 5 || f[1] != "states" || f[3] != "mixtures") r.fail("expected 'model L states N mixtures M'");
    HmmModel h;
    h.label = f[0];
    h.n_states = r.count(f[2]);
    const std::size_t mix = r.count(f[4]);
    for (std::size_t row = 0; row < h.n_states + 2; ++row) {
      auto v = r.numbers("trans", h.n_states + 2);
      h.trans.insert(h.trans.end(), v.begin(), v.end());
    }
    for (std::size_t j = 0; j < h.n_states; ++j) {
      Gmm g;
      for (std::size_t k = 0; k < mix; ++k) {
        auto w = r.line("mix");
        if (w.size() != 3 || r.count(w[0]) != j + 1 || r.count(w[1]) != k + 1) r.fail("mixture out of order");
        g.weights.push_back(r.number(w[2]));
        auto mu = r.numbers("mean", m.dim);
        auto var = r.numbers("var", m.dim);
        for (double v : var)
          if (!(v > 0)) r.fail("variances must be positive");
        g.means.insert(g.means.end(), mu.begin(), mu.end());
        g.vars.insert(g.vars.end(), var.begin(), var.end());
      }
      h.states.push_back(std::move(g));
    }
    if (m.models.count(h.label)) r.fail("duplicate model '" + h.label + "'");
    m.models[h.label] = std::move(h);
  }
  return m;
}

void save_models(const std::filesystem::path& path, const ModelSet& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_models(out, m);
}

ModelSet load_models(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_models(in, path.string());
}

}  // namespace visemes
