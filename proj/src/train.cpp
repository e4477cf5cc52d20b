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


#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "visemes/error.hpp"
#include "visemes/hmm.hpp"

namespace visemes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double safe_log(double p) { return p > 0 ? std::log(p) : kNegInf; }

// The utterance's label models laid end to end.
struct Chain {
  std::vector<const HmmModel*> model;  // per composite state
  std::vector<std::size_t> state;      // emitting state within its model, 1-based
  std::vector<std::size_t> position;   // index into the label sequence
  std::vector<double> log_self, log_next;
  double log_entry = 0.0;

  std::size_t size() const { return model.size(); }
};

Chain make_chain(const ModelSet& models, const LabelSeq& labels) {
  if (labels.empty()) throw InputError("empty transcript");
  Chain c;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const auto& h = models.at(labels[p]);
    for (std::size_t j = 1; j <= h.n_states; ++j) {
      c.model.push_back(&h);
      c.state.push_back(j);
      c.position.push_back(p);
      c.log_self.push_back(safe_log(h.a(j, j)));
      double next = h.a(j, j + 1);
      if (j == h.n_states && p + 1 < labels.size()) next *= models.at(labels[p + 1]).a(0, 1);
      c.log_next.push_back(safe_log(next));
    }
  }
  c.log_entry = safe_log(models.at(labels.front()).a(0, 1));
  return c;
}

// b[t * S + s]
std::vector<double> emissions(const Chain& c, const FeatureStream& x) {
  const std::size_t S = c.size(), T = x.frames();
  std::vector<double> b(T * S);
  std::map<const Gmm*, std::size_t> first;
  std::vector<std::size_t> source(S);
  for (std::size_t s = 0; s < S; ++s) {
    const Gmm* g = &c.model[s]->states[c.state[s] - 1];
    source[s] = first.emplace(g, s).first->second;
  }
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s)
      b[t * S + s] = source[s] == s ? c.model[s]->states[c.state[s] - 1].log_prob(x.frame(t)) : b[t * S + source[s]];
  return b;
}

void check_dim(const ModelSet& models, const FeatureStream& x) {
  if (x.dim != models.dim)
    throw InputError("stream '" + x.id + "' has dimension " + std::to_string(x.dim) + ", models expect " +
                     std::to_string(models.dim));
}

struct StateAcc {
  double occ = 0, self = 0, next = 0;
  std::vector<double> mix_occ, sum, sumsq;
};

using Accumulators = std::map<std::string, std::vector<StateAcc>>;

Accumulators make_accumulators(const ModelSet& models) {
  Accumulators acc;
  for (const auto& [label, h] : models.models) {
    auto& v = acc[label];
    v.resize(h.n_states);
    for (std::size_t j = 0; j < h.n_states; ++j) {
      const auto m = h.states[j].mixtures();
      v[j].mix_occ.assign(m, 0.0);
      v[j].sum.assign(m * models.dim, 0.0);
      v[j].sumsq.assign(m * models.dim, 0.0);
    }
  }
  return acc;
}

// Forward-backward over one utterance; adds statistics, returns log P.
double accumulate_utterance(const ModelSet& models, const FeatureStream& x, const LabelSeq& labels,
                            Accumulators& acc) {
  const Chain c = make_chain(models, labels);
  const std::size_t S = c.size(), T = x.frames(), d = models.dim;
  const auto b = emissions(c, x);
  std::vector<double> alpha(T * S, kNegInf), beta(T * S, kNegInf);
  alpha[0] = c.log_entry + b[0];
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t s = 0; s < S && s <= t; ++s) {
      double v = alpha[(t - 1) * S + s] + c.log_self[s];
      if (s > 0) v = log_add(v, alpha[(t - 1) * S + s - 1] + c.log_next[s - 1]);
      alpha[t * S + s] = v + b[t * S + s];
    }
  const double total = alpha[(T - 1) * S + S - 1] + c.log_next[S - 1];
  if (!std::isfinite(total)) throw ComputeError("utterance '" + x.id + "' has zero likelihood");

  beta[(T - 1) * S + S - 1] = c.log_next[S - 1];
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t s = 0; s < S; ++s) {
      double v = c.log_self[s] + b[(t + 1) * S + s] + beta[(t + 1) * S + s];
      if (s + 1 < S) v = log_add(v, c.log_next[s] + b[(t + 1) * S + s + 1] + beta[(t + 1) * S + s + 1]);
      beta[t * S + s] = v;
    }

  std::vector<double> comp;
  for (std::size_t s = 0; s < S; ++s) {
    auto& a = acc[c.model[s]->label][c.state[s] - 1];
    const Gmm& g = c.model[s]->states[c.state[s] - 1];
    for (std::size_t t = 0; t < T; ++t) {
      const double lg = alpha[t * S + s] + beta[t * S + s] - total;
      if (lg < -700) continue;
      const double gamma = std::exp(lg);
      a.occ += gamma;
      const auto f = x.frame(t);
      const double lb = g.component_log_probs(f, comp);
      for (std::size_t m = 0; m < comp.size(); ++m) {
        const double gm = gamma * std::exp(comp[m] - lb);
        if (gm == 0) continue;
        a.mix_occ[m] += gm;
        for (std::size_t k = 0; k < d; ++k) {
          a.sum[m * d + k] += gm * f[k];
          a.sumsq[m * d + k] += gm * f[k] * f[k];
        }
      }
      if (t + 1 < T) {
        a.self += std::exp(alpha[t * S + s] + c.log_self[s] + b[(t + 1) * S + s] + beta[(t + 1) * S + s] - total);
        if (s + 1 < S)
          a.next += std::exp(alpha[t * S + s] + c.log_next[s] + b[(t + 1) * S + s + 1] + beta[(t + 1) * S + s + 1] -
                             total);
      } else if (s + 1 == S) {
        a.next += gamma;
      }
    }
  }
  return total;
}

void update(ModelSet& models, const Accumulators& acc) {
  const std::size_t d = models.dim;
  for (auto& [label, h] : models.models) {
    const auto& states = acc.at(label);
    for (std::size_t j = 0; j < h.n_states; ++j) {
      const auto& a = states[j];
      if (a.occ <= 0) continue;
      auto& g = h.states[j];
      for (std::size_t m = 0; m < g.mixtures(); ++m) {
        g.weights[m] = a.mix_occ[m] / a.occ;
        if (a.mix_occ[m] <= 1e-10) continue;
        for (std::size_t k = 0; k < d; ++k) {
          const double mu = a.sum[m * d + k] / a.mix_occ[m];
          const double var = a.sumsq[m * d + k] / a.mix_occ[m] - mu * mu;
          g.means[m * d + k] = mu;
          g.vars[m * d + k] = std::max(var, models.var_floor[k]);
        }
      }
      const double out = a.self + a.next;
      if (out > 0) {
        h.a(j + 1, j + 1) = a.self / out;
        h.a(j + 1, j + 2) = a.next / out;
      }
    }
  }
}

std::size_t emitting_states(const ModelSet& models, const LabelSeq& labels) {
  std::size_t n = 0;
  for (const auto& l : labels) n += models.at(l).n_states;
  return n;
}

}  // namespace

double sequence_log_likelihood(const ModelSet& models, const FeatureStream& stream, const LabelSeq& labels) {
  check_dim(models, stream);
  if (stream.frames() < emitting_states(models, labels))
    throw ComputeError("stream '" + stream.id + "' is too short for its transcript");
  auto acc = make_accumulators(models);
  return accumulate_utterance(models, stream, labels, acc);
}

ForcedAlignment forced_align(const ModelSet& models, const FeatureStream& stream, const LabelSeq& labels) {
  check_dim(models, stream);
  const Chain c = make_chain(models, labels);
  const std::size_t S = c.size(), T = stream.frames();
  if (T < S)
    throw ComputeError("cannot align " + std::to_string(labels.size()) + " labels (" + std::to_string(S) +
                       " states) to " + std::to_string(T) + " frames of '" + stream.id + "'");
  const auto b = emissions(c, stream);
  std::vector<double> delta(T * S, kNegInf);
  std::vector<char> from_prev(T * S, 0);
  delta[0] = c.log_entry + b[0];
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t s = 0; s < S && s <= t; ++s) {
      double stay = delta[(t - 1) * S + s] + c.log_self[s];
      double move = s > 0 ? delta[(t - 1) * S + s - 1] + c.log_next[s - 1] : kNegInf;
      if (move > stay) {
        delta[t * S + s] = move + b[t * S + s];
        from_prev[t * S + s] = 1;
      } else {
        delta[t * S + s] = stay + b[t * S + s];
      }
    }
  ForcedAlignment out;
  out.log_likelihood = delta[(T - 1) * S + S - 1] + c.log_next[S - 1];
  if (!std::isfinite(out.log_likelihood)) throw ComputeError("no alignment path for '" + stream.id + "'");
  std::vector<std::size_t> path(T);
  std::size_t s = S - 1;
  for (std::size_t t = T; t-- > 0;) {
    path[t] = s;
    if (t > 0 && from_prev[t * S + s]) --s;
  }
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t p = c.position[path[t]];
    if (out.segments.empty() || out.segments.size() - 1 != p) out.segments.push_back({labels[p], t, t + 1});
    else out.segments.back().end = t + 1;
  }
  return out;
}

TrainLog reestimate(ModelSet& models, std::span<const FeatureStream> streams,
                    std::span<const std::vector<LabelSeq>> variants, const TrainConfig& cfg) {
  if (streams.size() != variants.size())
    throw InputError("got " + std::to_string(streams.size()) + " streams but " + std::to_string(variants.size()) +
                     " transcripts");
  for (std::size_t u = 0; u < streams.size(); ++u) {
    check_dim(models, streams[u]);
    if (variants[u].empty()) throw InputError("utterance '" + streams[u].id + "' has no transcript");
  }
  TrainLog log;
  log.chosen.assign(streams.size(), 0);
  for (std::size_t pass = 1; pass <= cfg.passes; ++pass) {
    auto acc = make_accumulators(models);
    double total = 0;
    log.skipped = 0;
    for (std::size_t u = 0; u < streams.size(); ++u) {
      const auto& labels = variants[u][log.chosen[u]];
      if (streams[u].frames() < emitting_states(models, labels)) {
        ++log.skipped;
        continue;
      }
      total += accumulate_utterance(models, streams[u], labels, acc);
    }
    log.log_likelihood.push_back(total);
    update(models, acc);
    if (cfg.align_at && pass == *cfg.align_at && pass < cfg.passes) {
      for (std::size_t u = 0; u < streams.size(); ++u) {
        double best = kNegInf;
        for (std::size_t v = 0; v < variants[u].size(); ++v) {
          if (streams[u].frames() < emitting_states(models, variants[u][v])) continue;
          const double score = forced_align(models, streams[u], variants[u][v]).log_likelihood;
          if (score > best) {
            best = score;
            log.chosen[u] = v;
          }
        }
      }
      log.realigned_after.push_back(pass);
    }
  }
  return log;
}

}  // namespace visemes
