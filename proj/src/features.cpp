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


#include "visemes/features.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "visemes/error.hpp"
#include "visemes/text.hpp"

namespace visemes {

FeatureStream parse_features_csv(std::istream& in, const std::string& id, const std::string& source) {
  FeatureStream s;
  s.id = id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    auto cells = split(body, ',');
    if (s.dim == 0) s.dim = cells.size();
    if (cells.size() != s.dim)
      throw ParseError(source, lineno, "expected " + std::to_string(s.dim) + " values, got " + std::to_string(cells.size()));
    for (const auto& c : cells) {
      auto cell = trim(c);
      double v = 0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size())
        throw ParseError(source, lineno, "not a number: '" + std::string(cell) + "'");
      s.data.push_back(v);
    }
  }
  return s;
}

void write_features_csv(std::ostream& out, const FeatureStream& s) {
  for (std::size_t t = 0; t < s.frames(); ++t) {
    auto f = s.frame(t);
    for (std::size_t k = 0; k < s.dim; ++k) out << (k ? "," : "") << format_double(f[k]);
    out << '\n';
  }
}

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                        static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

}  // namespace

FeatureStream read_features_binary(std::istream& in, const std::string& id, const std::string& source) {
  std::array<unsigned char, 16> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), header.size()))
    throw ParseError(source, 0, "truncated header");
  if (std::memcmp(header.data(), "VLF1", 4) != 0) throw ParseError(source, 0, "bad magic, expected VLF1");
  FeatureStream s;
  s.id = id;
  const std::uint32_t frames = read_u32(header.data() + 4);
  s.dim = read_u32(header.data() + 8);
  const std::size_t n = static_cast<std::size_t>(frames) * s.dim;
  std::vector<unsigned char> raw(n * 4);
  if (n && !in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw ParseError(source, 0, "truncated data");
  s.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.data[i] = std::bit_cast<float>(read_u32(raw.data() + 4 * i));
  return s;
}

void write_features_binary(std::ostream& out, const FeatureStream& s) {
  out.write("VLF1", 4);
  put_u32(out, static_cast<std::uint32_t>(s.frames()));
  put_u32(out, static_cast<std::uint32_t>(s.dim));
  put_u32(out, 0);
  for (double v : s.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

FeatureStream load_features(const std::filesystem::path& path, const std::string& id) {
  const auto name = id.empty() ? path.stem().string() : id;
  if (path.extension() == ".vlf") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return read_features_binary(in, name, path.string());
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_features_csv(in, name, path.string());
}

void save_features(const std::filesystem::path& path, const FeatureStream& s) {
  if (path.extension() == ".vlf") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_features_binary(out, s);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_features_csv(out, s);
}

}  // namespace visemes
