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


#include "visemes/confusion.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : ConfusionMatrix(labels, std::vector<std::uint64_t>(labels.size() * labels.size(), 0)) {}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels, std::vector<std::uint64_t> counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  if (counts_.size() != labels_.size() * labels_.size()) throw InputError("confusion matrix is not square");
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (!index_.emplace(labels_[i], i).second) throw InputError("duplicate confusion label " + labels_[i]);
}

std::optional<std::size_t> ConfusionMatrix::index_of(std::string_view label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t ConfusionMatrix::count(std::string_view truth, std::string_view hyp) const {
  auto i = index_of(truth), j = index_of(hyp);
  return (i && j) ? at(*i, *j) : 0;
}

void ConfusionMatrix::add(std::string_view truth, std::string_view hyp, std::uint64_t n) {
  auto i = index_of(truth), j = index_of(hyp);
  if (!i) throw InputError("unknown confusion label " + std::string(truth));
  if (!j) throw InputError("unknown confusion label " + std::string(hyp));
  counts_[*i * size() + *j] += n;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t i) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += at(i, j);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t j) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += at(i, j);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

ConfusionMatrix ConfusionMatrix::reordered(const std::vector<std::string>& labels) const {
  std::set<std::string> a(labels_.begin(), labels_.end()), b(labels.begin(), labels.end());
  if (a != b || labels.size() != labels_.size()) throw InputError("confusion label sets differ");
  return restricted(labels);
}

ConfusionMatrix ConfusionMatrix::restricted(const std::vector<std::string>& labels) const {
  std::vector<std::size_t> src;
  src.reserve(labels.size());
  for (const auto& l : labels) {
    auto i = index_of(l);
    if (!i) throw InputError("unknown confusion label " + l);
    src.push_back(*i);
  }
  ConfusionMatrix out(labels);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = 0; j < labels.size(); ++j) out.counts_[i * labels.size() + j] = at(src[i], src[j]);
  return out;
}

ConfusionMatrix accumulate(std::span<const ConfusionMatrix> matrices) {
  if (matrices.empty()) return ConfusionMatrix();
  ConfusionMatrix sum = matrices.front();
  std::vector<std::uint64_t> counts = sum.counts();
  for (std::size_t m = 1; m < matrices.size(); ++m) {
    auto aligned = matrices[m].reordered(sum.labels());
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += aligned.counts()[i];
  }
  return ConfusionMatrix(sum.labels(), std::move(counts));
}

NormalizedConfusion column_normalize(const ConfusionMatrix& k) {
  NormalizedConfusion p{k.labels(), std::vector<double>(k.size() * k.size(), 0.0), {}};
  for (std::size_t j = 0; j < k.size(); ++j) {
    auto sum = k.col_sum(j);
    if (sum == 0) {
      p.absent.push_back(k.labels()[j]);
      continue;
    }
    for (std::size_t i = 0; i < k.size(); ++i)
      p.probs[i * k.size() + j] = static_cast<double>(k.at(i, j)) / static_cast<double>(sum);
  }
  return p;
}

std::vector<Contribution> class_contribution(const ConfusionMatrix& k) {
  std::vector<Contribution> out;
  out.reserve(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    auto sum = k.col_sum(j);
    Contribution c{k.labels()[j], std::nullopt};
    if (sum > 0) c.value = static_cast<double>(k.at(j, j)) / static_cast<double>(sum);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Contribution& a, const Contribution& b) {
    if (a.value.has_value() != b.value.has_value()) return a.value.has_value();
    if (a.value && *a.value != *b.value) return *a.value > *b.value;
    return a.label < b.label;
  });
  return out;
}

ConfusionBuild build_from_alignments(std::span<const Alignment> alignments, const std::vector<std::string>& universe) {
  std::set<std::string> seen;
  for (const auto& a : alignments)
    for (const auto& op : a.ops) {
      if (op.op == EditOp::match || op.op == EditOp::substitution) {
        seen.insert(op.ref);
        seen.insert(op.hyp);
      }
    }
  std::vector<std::string> labels = universe;
  std::set<std::string> in_universe(universe.begin(), universe.end());
  for (const auto& l : seen)
    if (!in_universe.count(l)) labels.push_back(l);

  ConfusionBuild out{ConfusionMatrix(labels), {}, {}};
  for (const auto& a : alignments)
    for (const auto& op : a.ops) {
      switch (op.op) {
        case EditOp::match:
        case EditOp::substitution: out.matrix.add(op.ref, op.hyp); break;
        case EditOp::insertion: ++out.insertions[op.hyp]; break;
        case EditOp::deletion: ++out.deletions[op.ref]; break;
      }
    }
  return out;
}

ConfusionMatrix parse_confusion_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::string> rows;
  std::vector<std::uint64_t> counts;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto cells = split(line, ',');
    for (auto& c : cells) c = std::string(trim(c));
    if (header.empty()) {
      if (cells.size() < 2) throw ParseError(source, lineno, "header needs at least one label");
      header.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != header.size() + 1)
      throw ParseError(source, lineno, "expected " + std::to_string(header.size() + 1) + " cells, got " +
                                           std::to_string(cells.size()));
    rows.push_back(cells[0]);
    for (std::size_t j = 1; j < cells.size(); ++j) {
      std::uint64_t v = 0;
      const auto& c = cells[j];
      auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (c.empty() || res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw ParseError(source, lineno, "cell '" + c + "' is not a non-negative integer");
      counts.push_back(v);
    }
  }
  if (header.empty()) throw ParseError(source, lineno, "empty confusion matrix file");
  if (rows.size() != header.size()) throw ParseError(source, lineno, "matrix is not square");
  try {
    ConfusionMatrix by_rows(rows, std::move(counts));
    std::set<std::string> hs(header.begin(), header.end()), rs(rows.begin(), rows.end());
    if (hs != rs || hs.size() != header.size()) throw InputError("row and column labels differ");
    // Rows are stored as read; columns were read in header order.
    ConfusionMatrix out(rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < header.size(); ++j) out.add(rows[i], header[j], by_rows.at(i, j));
    return out;
  } catch (const InputError& e) {
    throw ParseError(source, 0, e.what());
  }
}

ConfusionMatrix load_confusion_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_confusion_csv(in, path.string());
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& k) {
  for (const auto& l : k.labels()) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < k.size(); ++i) {
    out << k.labels()[i];
    for (std::size_t j = 0; j < k.size(); ++j) out << ',' << k.at(i, j);
    out << '\n';
  }
}

}  // namespace visemes
