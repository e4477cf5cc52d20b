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


#include "visemes/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0 ? std::log(p) : kNegInf; }

void normalise(std::span<double> row, double floor) {
  double total = 0;
  for (double v : row) total += v;
  for (auto& v : row) v = total > 0 ? v / total : 1.0 / static_cast<double>(row.size());
  if (floor <= 0) return;
  total = 0;
  for (auto& v : row) total += (v = std::max(v, floor));
  for (auto& v : row) v /= total;
}

}  // namespace

std::size_t BigramNetwork::index_of(const std::string& token) const {
  auto it = std::find(tokens.begin(), tokens.end(), token);
  if (it == tokens.end()) throw InputError("token '" + token + "' is not in the network");
  return static_cast<std::size_t>(it - tokens.begin());
}

BigramNetwork build_bigram(std::span<const LabelSeq> corpus, double floor, const std::vector<std::string>& tokens) {
  if (floor < 0 || floor >= 1) throw InputError("bigram floor must lie in [0, 1)");
  BigramNetwork net;
  if (tokens.empty()) {
    std::set<std::string> seen;
    for (const auto& u : corpus) seen.insert(u.begin(), u.end());
    net.tokens.assign(seen.begin(), seen.end());
  } else {
    net.tokens = tokens;
  }
  if (net.tokens.empty()) throw InputError("bigram corpus has no tokens");
  const std::size_t n = net.size();
  net.start.assign(n, 0.0);
  net.bigram.assign(n * (n + 1), 0.0);
  for (const auto& u : corpus) {
    if (u.empty()) continue;
    std::size_t prev = net.index_of(u.front());
    net.start[prev] += 1;
    for (std::size_t i = 1; i < u.size(); ++i) {
      const std::size_t cur = net.index_of(u[i]);
      net.bigram[prev * (n + 1) + cur] += 1;
      prev = cur;
    }
    net.bigram[prev * (n + 1) + n] += 1;
  }
  normalise(net.start, floor);
  for (std::size_t i = 0; i < n; ++i) normalise({net.bigram.data() + i * (n + 1), n + 1}, floor);
  return net;
}

void write_bigram(std::ostream& out, const BigramNetwork& net) {
  out << "from,to,p\n";
  for (std::size_t j = 0; j < net.size(); ++j) out << "<s>," << net.tokens[j] << ',' << format_double(net.start[j]) << '\n';
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t j = 0; j < net.size(); ++j)
      out << net.tokens[i] << ',' << net.tokens[j] << ',' << format_double(net.p(i, j)) << '\n';
    out << net.tokens[i] << ",</s>," << format_double(net.p_end(i)) << '\n';
  }
}

namespace {

// One pronunciation of one token, expanded to emitting states.
struct Path {
  std::size_t token;
  std::vector<const Gmm*> gmm;
  std::vector<double> log_self, log_next;  // log_next of the last state = exit
  double log_entry;
};

struct Cell {
  double score = kNegInf;
  int link = -1;  // last completed token before this one
};

struct Link {
  std::size_t token;
  int prev;
};

}  // namespace

DecodeResult decode(const ModelSet& models, const BigramNetwork& net, const FeatureStream& stream,
                    const DecodeConfig& cfg, const TokenLexicon& lexicon) {
  const std::size_t T = stream.frames();
  if (T == 0) throw InputError("cannot decode an empty stream");
  if (stream.dim != models.dim) throw InputError("stream '" + stream.id + "' has the wrong dimension");
  const std::size_t V = net.size();
  auto lm = [&](double p) { return cfg.grammar_scale == 0 ? 0.0 : cfg.grammar_scale * safe_log(p); };

  std::vector<Path> paths;
  for (std::size_t w = 0; w < V; ++w) {
    std::vector<LabelSeq> prons;
    if (auto it = lexicon.find(net.tokens[w]); it != lexicon.end())
      prons = it->second;
    else
      prons = {{net.tokens[w]}};
    for (const auto& pron : prons) {
      if (pron.empty()) throw InputError("token '" + net.tokens[w] + "' has an empty pronunciation");
      Path p{w, {}, {}, {}, safe_log(models.at(pron.front()).a(0, 1))};
      for (std::size_t i = 0; i < pron.size(); ++i) {
        const auto& h = models.at(pron[i]);
        for (std::size_t j = 1; j <= h.n_states; ++j) {
          p.gmm.push_back(&h.states[j - 1]);
          p.log_self.push_back(safe_log(h.a(j, j)));
          double next = h.a(j, j + 1);
          if (j == h.n_states && i + 1 < pron.size()) next *= models.at(pron[i + 1]).a(0, 1);
          p.log_next.push_back(safe_log(next));
        }
      }
      paths.push_back(std::move(p));
    }
  }

  // Emission cache per distinct mixture.
  std::map<const Gmm*, std::size_t> gmm_index;
  for (const auto& p : paths)
    for (auto* g : p.gmm) gmm_index.emplace(g, gmm_index.size());
  std::vector<const Gmm*> gmms(gmm_index.size());
  for (const auto& [g, i] : gmm_index) gmms[i] = g;
  std::vector<std::vector<std::size_t>> path_gmm(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k)
    for (auto* g : paths[k].gmm) path_gmm[k].push_back(gmm_index[g]);

  std::vector<Link> links;
  std::vector<std::vector<Cell>> cur(paths.size()), nxt(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    cur[k].assign(paths[k].gmm.size(), Cell{});
    nxt[k].assign(paths[k].gmm.size(), Cell{});
  }
  std::vector<double> b(gmms.size());
  std::vector<Cell> ends(V);

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < gmms.size(); ++i) b[i] = gmms[i]->log_prob(stream.frame(t));
    // Best token entry per target token from the ends of frame t-1.
    std::vector<Cell> entry(V);
    for (std::size_t w = 0; w < V; ++w) {
      if (t == 0) {
        entry[w] = {lm(net.start[w]) - cfg.transition_penalty, -1};
        continue;
      }
      for (std::size_t u = 0; u < V; ++u) {
        if (ends[u].score == kNegInf) continue;
        const double s = ends[u].score + lm(net.p(u, w)) - cfg.transition_penalty;
        if (s > entry[w].score) entry[w] = {s, ends[u].link};
      }
    }
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const auto& p = paths[k];
      for (std::size_t s = 0; s < p.gmm.size(); ++s) {
        Cell best;
        if (t > 0) {
          if (cur[k][s].score != kNegInf) best = {cur[k][s].score + p.log_self[s], cur[k][s].link};
          if (s > 0 && cur[k][s - 1].score != kNegInf) {
            const double v = cur[k][s - 1].score + p.log_next[s - 1];
            if (v > best.score) best = {v, cur[k][s - 1].link};
          }
        }
        if (s == 0 && entry[p.token].score != kNegInf) {
          const double v = entry[p.token].score + p.log_entry;
          if (v > best.score) best = {v, entry[p.token].link};
        }
        if (best.score != kNegInf) best.score += b[path_gmm[k][s]];
        nxt[k][s] = best;
      }
    }
    std::swap(cur, nxt);
    std::fill(ends.begin(), ends.end(), Cell{});
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const std::size_t last = paths[k].gmm.size() - 1;
      if (cur[k][last].score == kNegInf) continue;
      const double v = cur[k][last].score + paths[k].log_next[last];
      if (v > ends[paths[k].token].score) ends[paths[k].token] = {v, cur[k][last].link};
    }
    for (std::size_t w = 0; w < V; ++w) {
      if (ends[w].score == kNegInf) continue;
      links.push_back({w, ends[w].link});
      ends[w].link = static_cast<int>(links.size() - 1);
    }
  }

  DecodeResult out;
  out.score = kNegInf;
  int best_link = -1;
  for (std::size_t w = 0; w < V; ++w) {
    if (ends[w].score == kNegInf) continue;
    const double v = ends[w].score + lm(net.p_end(w));
    if (v > out.score) {
      out.score = v;
      best_link = ends[w].link;
    }
  }
  if (best_link < 0) throw ComputeError("no token sequence fits stream '" + stream.id + "'");
  for (int l = best_link; l >= 0; l = links[static_cast<std::size_t>(l)].prev)
    out.tokens.push_back(net.tokens[links[static_cast<std::size_t>(l)].token]);
  std::reverse(out.tokens.begin(), out.tokens.end());
  return out;
}

}  // namespace visemes
