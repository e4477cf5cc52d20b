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


#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visemes/scoring.hpp"

namespace visemes {

/// Square count table: at(i, j) = times true class i was recognised as j.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  /// Zero matrix. Throws InputError on duplicate labels.
  explicit ConfusionMatrix(std::vector<std::string> labels);
  /// Row-major counts, labels.size()^2 entries.
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::uint64_t> counts);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  std::uint64_t at(std::size_t truth, std::size_t hyp) const { return counts_[truth * size() + hyp]; }
  /// By label; unknown labels read as zero.
  std::uint64_t count(std::string_view truth, std::string_view hyp) const;
  /// Throws InputError for unknown labels.
  void add(std::string_view truth, std::string_view hyp, std::uint64_t n = 1);

  std::uint64_t row_sum(std::size_t i) const;
  std::uint64_t col_sum(std::size_t j) const;
  std::uint64_t total() const;

  /// Same counts under another ordering of the same label set.
  ConfusionMatrix reordered(const std::vector<std::string>& labels) const;
  /// Restriction to a subset of labels (rows and columns).
  ConfusionMatrix restricted(const std::vector<std::string>& labels) const;

  const std::vector<std::uint64_t>& counts() const { return counts_; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Column-normalised view: probs[i][j] = Pr{true i | recognised j}.
/// Columns with no counts stay all zero.
struct NormalizedConfusion {
  std::vector<std::string> labels;
  std::vector<double> probs;
  double at(std::size_t i, std::size_t j) const { return probs[i * labels.size() + j]; }
  /// Labels never recognised (zero column).
  std::vector<std::string> absent;
};

/// Element-wise sum after aligning labels to the first matrix's order.
/// Throws InputError when label sets differ.
ConfusionMatrix accumulate(std::span<const ConfusionMatrix> matrices);

NormalizedConfusion column_normalize(const ConfusionMatrix& k);

struct Contribution {
  std::string label;
  /// K[j][j] / colsum(j); empty when label j was never recognised.
  std::optional<double> value;
};

/// Pr{v | v^} per label, ranked descending; ties lexicographic on label;
/// undefined values last.
std::vector<Contribution> class_contribution(const ConfusionMatrix& k);

struct ConfusionBuild {
  ConfusionMatrix matrix;
  /// Per-label insertion and deletion tallies, kept outside the matrix.
  std::map<std::string, std::uint64_t> insertions;
  std::map<std::string, std::uint64_t> deletions;
};

/// Matches add to the diagonal, substitutions to K[truth][hyp]. Labels are
/// `universe` (in order) followed by any other label seen, sorted.
ConfusionBuild build_from_alignments(std::span<const Alignment> alignments,
                                     const std::vector<std::string>& universe = {});

/// CSV: header row holds recognised labels (first cell empty), each
/// following row a true label and its counts.
ConfusionMatrix parse_confusion_csv(std::istream& in, const std::string& source = "<csv>");
ConfusionMatrix load_confusion_csv(const std::filesystem::path& path);
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& k);

}  // namespace visemes
