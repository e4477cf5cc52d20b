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


#include "visemes/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "visemes/error.hpp"

namespace visemes {

Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp, EditCosts costs) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<long> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> long& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<long>(i) * costs.deletion;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<long>(j) * costs.insertion;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      long diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : costs.substitution);
      at(i, j) = std::min({diag, at(i - 1, j) + costs.deletion, at(i, j - 1) + costs.insertion});
    }

  Alignment a;
  a.n = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      bool same = ref[i - 1] == hyp[j - 1];
      long diag = at(i - 1, j - 1) + (same ? 0 : costs.substitution);
      if (diag == at(i, j)) {
        a.ops.push_back({same ? EditOp::match : EditOp::substitution, ref[i - 1], hyp[j - 1]});
        if (!same) ++a.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + costs.deletion == at(i, j)) {
      a.ops.push_back({EditOp::deletion, ref[i - 1], {}});
      ++a.deletions;
      --i;
      continue;
    }
    a.ops.push_back({EditOp::insertion, {}, hyp[j - 1]});
    ++a.insertions;
    --j;
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

Alignment merge(std::span<const Alignment> alignments) {
  Alignment out;
  for (const auto& a : alignments) {
    out.ops.insert(out.ops.end(), a.ops.begin(), a.ops.end());
    out.n += a.n;
    out.deletions += a.deletions;
    out.substitutions += a.substitutions;
    out.insertions += a.insertions;
  }
  return out;
}

double correctness(const Alignment& a) {
  if (a.n == 0) throw InputError("correctness undefined for an empty reference");
  return static_cast<double>(a.n - a.deletions - a.substitutions) / static_cast<double>(a.n);
}

double accuracy(const Alignment& a) {
  if (a.n == 0) throw InputError("accuracy undefined for an empty reference");
  return (static_cast<double>(a.n) - static_cast<double>(a.deletions + a.substitutions + a.insertions)) /
         static_cast<double>(a.n);
}

FoldStats fold_stats(std::span<const double> values) {
  if (values.empty()) throw InputError("fold statistics need at least one value");
  FoldStats s;
  s.values.assign(values.begin(), values.end());
  const double k = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (k - 1.0));
  }
  s.stderr_ = s.sd / std::sqrt(k);
  return s;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("spearman: samples differ in length");
  if (x.size() < 2) throw InputError("spearman: need at least two observations");
  auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) throw InputError("spearman: constant sample");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const std::string> a, std::span<const std::string> b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa != sb || sa.size() != a.size() || sb.size() != b.size())
    throw InputError("spearman: rankings must order the same distinct labels");
  std::vector<double> x(a.size()), y(a.size());
  std::map<std::string, std::size_t> pos_b;
  for (std::size_t i = 0; i < b.size(); ++i) pos_b[b[i]] = i;
  for (std::size_t i = 0; i < a.size(); ++i) {
    x[i] = static_cast<double>(i + 1);
    y[i] = static_cast<double>(pos_b[a[i]] + 1);
  }
  return spearman(std::span<const double>(x), std::span<const double>(y));
}

int band_score(double mean, double baseline_mean, double baseline_stderr) {
  const double d = mean - baseline_mean;
  if (d == 0.0) return 0;
  const int sign = d > 0 ? 1 : -1;
  return std::abs(d) <= baseline_stderr ? sign : 2 * sign;
}

WeightedRank weighted_rank(const WeightedRankInput& in) {
  WeightedRank out;
  for (const auto& map : in.maps) {
    int total = 0;
    auto owner = in.owner.find(map);
    for (const auto& speaker : in.speakers) {
      int score = 0;
      if (owner == in.owner.end() || owner->second != speaker) {
        auto cell = in.cells.find({map, speaker});
        if (cell == in.cells.end()) throw InputError("weighted rank: no result for map " + map + " on " + speaker);
        auto base = in.baseline.find(speaker);
        if (base == in.baseline.end()) throw InputError("weighted rank: no baseline for " + speaker);
        score = band_score(cell->second.mean, base->second.mean, base->second.stderr_);
      }
      out.cell_scores[{map, speaker}] = score;
      total += score;
    }
    out.totals[map] = total;
  }
  return out;
}

}  // namespace visemes
