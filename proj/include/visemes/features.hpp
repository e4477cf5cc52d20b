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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace visemes {

/// T frames of d features, row-major.
struct FeatureStream {
  std::string id;
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t frames() const { return dim ? data.size() / dim : 0; }
  std::span<const double> frame(std::size_t t) const { return {data.data() + t * dim, dim}; }
};

/// CSV: one frame per line, comma separated; `#` lines are comments.
FeatureStream parse_features_csv(std::istream& in, const std::string& id, const std::string& source = "<csv>");
void write_features_csv(std::ostream& out, const FeatureStream& s);

/// Binary: magic "VLF1", uint32 T, uint32 d, uint32 reserved (0), then T*d
/// little-endian float32 values.
FeatureStream read_features_binary(std::istream& in, const std::string& id, const std::string& source = "<vlf>");
void write_features_binary(std::ostream& out, const FeatureStream& s);

/// Picks the format from the extension (.csv or .vlf).
FeatureStream load_features(const std::filesystem::path& path, const std::string& id = {});
void save_features(const std::filesystem::path& path, const FeatureStream& s);

}  // namespace visemes
