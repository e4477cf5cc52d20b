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


#include "visemes/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "visemes/error.hpp"

namespace visemes {

void ClusterConfig::validate() const {
  if (vc_policy == VcPolicy::split && !inventory)
    throw InputError("the split vowel/consonant policy needs a phoneme inventory");
  for (std::size_t i = 0; i < target_sizes.size(); ++i) {
    if (target_sizes[i] < 2) throw InputError("target sizes must be at least 2");
    if (i && target_sizes[i] >= target_sizes[i - 1]) throw InputError("target sizes must strictly decrease");
  }
}

namespace {

// Shared view of a confusion matrix for the clustering passes.
class ClusterInput {
 public:
  ClusterInput(const ConfusionMatrix& k, const ClusterConfig& cfg) : k_(k), split_(cfg.vc_policy == VcPolicy::split) {
    cfg.validate();
    const std::size_t n = k.size();
    group_.assign(n, 0);
    special_.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& label = k.labels()[i];
      std::optional<PhonemeClass> klass;
      if (cfg.inventory) klass = cfg.inventory->find(label);
      if (is_special_label(label) || (klass && (*klass == PhonemeClass::silence ||
                                                *klass == PhonemeClass::short_pause))) {
        special_[i] = true;
        continue;
      }
      if (split_) {
        if (!klass) throw InputError("label '" + label + "' is not in the inventory");
        group_[i] = *klass == PhonemeClass::vowel ? 1 : 2;
      }
    }
  }

  std::size_t size() const { return k_.size(); }
  const std::string& label(std::size_t i) const { return k_.labels()[i]; }
  std::uint64_t diag(std::size_t i) const { return k_.at(i, i); }
  std::uint64_t mutual(std::size_t i, std::size_t j) const { return k_.at(i, j) + k_.at(j, i); }
  bool special(std::size_t i) const { return special_[i]; }
  bool present(std::size_t i) const { return k_.row_sum(i) + k_.col_sum(i) > 0; }
  std::uint64_t off_diagonal(std::size_t i) const { return k_.row_sum(i) + k_.col_sum(i) - 2 * diag(i); }
  bool compatible(std::size_t i, std::size_t j) const { return !split_ || group_[i] == group_[j]; }
  int group(std::size_t i) const { return group_[i]; }

  std::vector<VisemeClass> special_classes() const {
    std::vector<VisemeClass> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (special_[i] && present(i)) {
        const auto& l = label(i);
        std::string cls = is_special_label(l) ? l : "sil";
        auto it = std::find_if(out.begin(), out.end(), [&](const VisemeClass& c) { return c.label == cls; });
        if (it == out.end())
          out.push_back({cls, {l}});
        else
          it->phonemes.push_back(l);
      }
    return out;
  }

  std::vector<std::string> garbage_labels() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (!present(i) && !special_[i]) out.push_back(label(i));
    return out;
  }

 private:
  const ConfusionMatrix& k_;
  bool split_;
  std::vector<int> group_;
  std::vector<bool> special_;
};

struct Clique {
  std::vector<std::size_t> members;  // sorted by label
  std::uint64_t weight = 0;
};

// Bron-Kerbosch with pivoting over the mutual-confusion graph restricted to
// `active`, keeping every clique of maximal (size, weight).
class CliqueSearch {
 public:
  CliqueSearch(const ClusterInput& in, const std::vector<std::size_t>& active) : in_(in), active_(active) {
    const std::size_t n = active.size();
    adj_.assign(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        auto i = active[a], j = active[b];
        bool e = in.mutual(i, j) > 0 && in.compatible(i, j);
        adj_[a][b] = adj_[b][a] = e;
      }
  }

  std::vector<Clique> best() {
    std::vector<std::size_t> r, p(active_.size()), x;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
    expand(r, p, x);
    return best_;
  }

 private:
  void expand(std::vector<std::size_t>& r, std::vector<std::size_t> p, std::vector<std::size_t> x) {
    if (r.size() + p.size() < best_size_) return;
    if (p.empty() && x.empty()) {
      report(r);
      return;
    }
    std::size_t pivot = p.empty() ? x.front() : p.front();
    std::size_t pivot_deg = 0;
    for (auto u : p) {
      std::size_t d = 0;
      for (auto v : p) d += adj_[u][v];
      if (d >= pivot_deg) {
        pivot_deg = d;
        pivot = u;
      }
    }
    auto candidates = p;
    for (auto v : candidates) {
      if (adj_[pivot][v]) continue;
      std::vector<std::size_t> np, nx;
      for (auto u : p)
        if (adj_[v][u]) np.push_back(u);
      for (auto u : x)
        if (adj_[v][u]) nx.push_back(u);
      r.push_back(v);
      expand(r, std::move(np), std::move(nx));
      r.pop_back();
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
    }
  }

  void report(const std::vector<std::size_t>& r) {
    Clique c;
    for (auto a : r) c.members.push_back(active_[a]);
    std::sort(c.members.begin(), c.members.end(),
              [&](auto i, auto j) { return in_.label(i) < in_.label(j); });
    for (std::size_t a = 0; a < c.members.size(); ++a)
      for (std::size_t b = a + 1; b < c.members.size(); ++b) c.weight += in_.mutual(c.members[a], c.members[b]);
    if (c.members.size() > best_size_ || (c.members.size() == best_size_ && c.weight > best_weight_)) {
      best_size_ = c.members.size();
      best_weight_ = c.weight;
      best_.clear();
    }
    if (c.members.size() == best_size_ && c.weight == best_weight_) best_.push_back(std::move(c));
  }

  const ClusterInput& in_;
  const std::vector<std::size_t>& active_;
  std::vector<std::vector<bool>> adj_;
  std::vector<Clique> best_;
  std::size_t best_size_ = 0;
  std::uint64_t best_weight_ = 0;
};

bool label_less(const ClusterInput& in, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [&](auto i, auto j) { return in.label(i) < in.label(j); });
}

std::vector<std::string> labels_of(const ClusterInput& in, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(in.label(i));
  return out;
}

std::vector<VisemeClass> numbered(std::vector<std::vector<std::string>> groups) {
  std::vector<VisemeClass> out;
  for (auto& g : groups) out.push_back({viseme_label(out.size()), std::move(g)});
  return out;
}

}  // namespace

P2VMap strict_cluster(const ConfusionMatrix& k, const ClusterConfig& cfg) {
  ClusterInput in(k, cfg);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::vector<std::string>> groups;
  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in.special(i) || !in.present(i)) continue;
    if (in.diag(i) > 0 && in.off_diagonal(i) == 0)
      groups.push_back({in.label(i)});
    else
      remaining.push_back(i);
  }

  for (;;) {
    auto best = CliqueSearch(in, remaining).best();
    if (best.empty() || best.front().members.size() < 2) break;
    std::size_t pick = 0;
    if (cfg.tie_break == TieBreak::seeded_random) {
      std::sort(best.begin(), best.end(),
                [&](const Clique& a, const Clique& b) { return label_less(in, a.members, b.members); });
      pick = std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng);
    } else {
      for (std::size_t c = 1; c < best.size(); ++c)
        if (label_less(in, best[c].members, best[pick].members)) pick = c;
    }
    const auto& chosen = best[pick].members;
    groups.push_back(labels_of(in, chosen));
    std::erase_if(remaining, [&](auto i) { return std::find(chosen.begin(), chosen.end(), i) != chosen.end(); });
  }
  for (auto i : remaining) groups.push_back({in.label(i)});

  P2VMap map(cfg.name, numbered(std::move(groups)), in.garbage_labels(), in.special_classes());
  map.set_split(cfg.vc_policy == VcPolicy::split);
  map.set_provenance("strictly-confused clustering");
  return map;
}

P2VMap relaxed_cluster(const ConfusionMatrix& k, const P2VMap& strict, const ClusterConfig& cfg) {
  ClusterInput in(k, cfg);
  std::mt19937_64 rng(cfg.seed);
  auto mutual = [&](const std::string& a, const std::string& b) -> std::uint64_t {
    auto i = k.index_of(a), j = k.index_of(b);
    return (i && j) ? in.mutual(*i, *j) : 0;
  };
  auto group_of = [&](const std::string& label) {
    auto i = k.index_of(label);
    return i ? in.group(*i) : 0;
  };

  const auto& classes = strict.classes();
  std::vector<std::vector<std::string>> members;
  std::vector<bool> multi;
  for (const auto& c : classes) {
    members.push_back(c.phonemes);
    multi.push_back(c.phonemes.size() > 1);
  }
  std::vector<bool> keep(classes.size(), true);
  std::vector<std::string> garbage = strict.garbage();

  for (std::size_t s = 0; s < classes.size(); ++s) {
    if (multi[s]) continue;
    const auto& p = classes[s].phonemes.front();
    std::uint64_t best_score = 0;
    std::vector<std::size_t> tied;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (!multi[c]) continue;
      if (cfg.vc_policy == VcPolicy::split && group_of(classes[c].phonemes.front()) != group_of(p)) continue;
      std::uint64_t score = 0;
      for (const auto& m : classes[c].phonemes) score += mutual(p, m);
      if (score == 0) continue;
      if (score > best_score) {
        best_score = score;
        tied.clear();
      }
      if (score == best_score) tied.push_back(c);
    }
    if (tied.empty()) {
      auto i = k.index_of(p);
      if (!i || in.diag(*i) == 0) {
        garbage.push_back(p);
        keep[s] = false;
      }
      continue;
    }
    std::size_t target = tied.front();
    if (cfg.tie_break == TieBreak::seeded_random) {
      target = tied[std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng)];
    } else {
      for (auto c : tied)
        if (classes[c].label < classes[target].label) target = c;
    }
    members[target].push_back(p);
    keep[s] = false;
  }

  std::vector<std::vector<std::string>> groups;
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (keep[c]) groups.push_back(std::move(members[c]));
  P2VMap map(strict.name(), numbered(std::move(groups)), std::move(garbage), strict.special());
  map.set_split(strict.split());
  map.set_provenance("relaxed-confused clustering");
  return map;
}

P2VMap cluster(const ConfusionMatrix& k, const ClusterConfig& cfg) {
  auto strict = strict_cluster(k, cfg);
  return cfg.mode == ClusterMode::relaxed ? relaxed_cluster(k, strict, cfg) : strict;
}

P2VMap common_pair_cluster(std::span<const P2VMap> catalog, std::string name) {
  if (catalog.empty()) throw InputError("common-pair clustering needs at least one map");
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  std::set<std::string> phonemes;
  for (const auto& m : catalog)
    for (const auto& c : m.classes()) {
      std::set<std::string> members(c.phonemes.begin(), c.phonemes.end());
      phonemes.insert(members.begin(), members.end());
      for (auto a = members.begin(); a != members.end(); ++a)
        for (auto b = std::next(a); b != members.end(); ++b) ++counts[{*a, *b}];
    }
  std::vector<std::pair<std::pair<std::string, std::string>, std::size_t>> pairs(counts.begin(), counts.end());
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.second > y.second; });

  std::vector<std::vector<std::string>> groups;
  std::map<std::string, std::size_t> owner;
  for (const auto& [pair, n] : pairs) {
    const auto& [a, b] = pair;
    auto ia = owner.find(a), ib = owner.find(b);
    if (ia == owner.end() && ib == owner.end()) {
      owner[a] = owner[b] = groups.size();
      groups.push_back({a, b});
    } else if (ia != owner.end() && ib == owner.end()) {
      groups[ia->second].push_back(b);
      owner[b] = ia->second;
    } else if (ia == owner.end() && ib != owner.end()) {
      groups[ib->second].push_back(a);
      owner[a] = ib->second;
    }
  }
  for (const auto& p : phonemes)
    if (!owner.count(p)) groups.push_back({p});

  P2VMap map(std::move(name), numbered(std::move(groups)));
  map.set_provenance("common-pair clustering over " + std::to_string(catalog.size()) + " maps");
  return map;
}

ControlledMerge controlled_merge(const ConfusionMatrix& k, const ClusterConfig& cfg) {
  ClusterInput in(k, cfg);
  std::mt19937_64 rng(cfg.seed);
  ControlledMerge out;

  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!in.special(i) && in.present(i)) classes.push_back({i});
  const auto garbage = in.garbage_labels();
  const auto special = in.special_classes();

  const std::size_t floor = cfg.target_sizes.empty() ? 2 : cfg.target_sizes.back();
  auto wanted = [&](std::size_t size) {
    return cfg.target_sizes.empty() ||
           std::find(cfg.target_sizes.begin(), cfg.target_sizes.end(), size) != cfg.target_sizes.end();
  };
  auto emit = [&] {
    std::vector<std::vector<std::string>> groups;
    for (const auto& c : classes) groups.push_back(labels_of(in, c));
    std::string digits = std::to_string(classes.size());
    if (digits.size() < 2) digits.insert(0, "0");
    P2VMap map(cfg.name + "-m" + digits, numbered(std::move(groups)), garbage, special);
    map.set_split(cfg.vc_policy == VcPolicy::split);
    map.set_provenance("controlled merging, " + std::to_string(classes.size()) + " classes");
    out.maps.push_back(std::move(map));
  };
  auto min_label = [&](const std::vector<std::size_t>& c) {
    const std::string* m = &in.label(c.front());
    for (auto i : c) m = std::min(m, &in.label(i), [](auto* a, auto* b) { return *a < *b; });
    return *m;
  };

  if (wanted(classes.size())) emit();
  constexpr double kTieTolerance = 1e-12;
  while (classes.size() > floor) {
    const std::size_t c = classes.size();
    std::vector<double> kc(c * c, 0.0), col(c, 0.0);
    for (std::size_t r = 0; r < c; ++r)
      for (std::size_t s = 0; s < c; ++s) {
        std::uint64_t sum = 0;
        for (auto i : classes[r])
          for (auto j : classes[s]) sum += k.at(i, j);
        kc[r * c + s] = static_cast<double>(sum);
        col[s] += static_cast<double>(sum);
      }
    auto p = [&](std::size_t r, std::size_t s) { return col[s] > 0 ? kc[r * c + s] / col[s] : 0.0; };

    double best_q = -1.0;
    std::vector<std::pair<std::size_t, std::size_t>> tied;
    for (std::size_t r = 0; r < c; ++r)
      for (std::size_t s = r + 1; s < c; ++s) {
        if (!in.compatible(classes[r].front(), classes[s].front())) continue;
        double q = p(r, s) + p(s, r);
        if (q > best_q + kTieTolerance) {
          best_q = q;
          tied.clear();
        }
        if (std::abs(q - best_q) <= kTieTolerance) tied.emplace_back(r, s);
      }
    if (tied.empty()) {
      out.warnings.push_back("no legal merge left at " + std::to_string(c) + " classes");
      break;
    }
    auto key = [&](const std::pair<std::size_t, std::size_t>& t) {
      auto a = min_label(classes[t.first]), b = min_label(classes[t.second]);
      return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    std::size_t pick = 0;
    if (cfg.tie_break == TieBreak::seeded_random) {
      std::sort(tied.begin(), tied.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
      pick = std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng);
    } else {
      for (std::size_t t = 1; t < tied.size(); ++t)
        if (key(tied[t]) < key(tied[pick])) pick = t;
    }
    auto [r, s] = tied[pick];
    MergeStep step;
    step.merged_a = labels_of(in, classes[r]);
    step.merged_b = labels_of(in, classes[s]);
    step.q = p(r, s) + p(s, r);
    classes[r].insert(classes[r].end(), classes[s].begin(), classes[s].end());
    classes.erase(classes.begin() + static_cast<std::ptrdiff_t>(s));
    step.size_after = classes.size();
    out.steps.push_back(std::move(step));

    if (cfg.vc_policy == VcPolicy::split) {
      std::size_t groups_left = 0;
      for (std::size_t a = 0; a < classes.size(); ++a) {
        bool alone = true;
        for (std::size_t b = 0; b < classes.size(); ++b)
          if (a != b && in.compatible(classes[a].front(), classes[b].front())) alone = false;
        groups_left += alone;
      }
      if (groups_left > 0 && classes.size() > floor && out.warnings.empty())
        out.warnings.push_back("one vowel/consonant side reached a single class at size " +
                               std::to_string(classes.size()));
    }
    if (wanted(classes.size())) emit();
  }
  return out;
}

P2VMap derive_ms_si(std::span<const std::pair<std::string, ConfusionMatrix>> speakers,
                    const std::optional<std::string>& hold_out, const ClusterConfig& cfg) {
  if (speakers.empty()) throw InputError("no speaker confusion matrices given");
  std::vector<ConfusionMatrix> selected;
  bool found = !hold_out.has_value();
  for (const auto& [id, k] : speakers) {
    if (hold_out && id == *hold_out) {
      found = true;
      continue;
    }
    selected.push_back(k);
  }
  if (!found) throw InputError("unknown hold-out speaker '" + *hold_out + "'");
  if (hold_out && speakers.size() < 2)
    throw InputError("a speaker-independent map needs at least two speakers");
  auto named = cfg;
  named.name = hold_out ? "SI-not-" + *hold_out : "MS";
  return cluster(accumulate(selected), named);
}

}  // namespace visemes
