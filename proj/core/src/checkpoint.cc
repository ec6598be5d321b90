// Copyright 2026 The advgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advgrasp/checkpoint.h"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "advgrasp/errors.h"

namespace advgrasp {

namespace {

constexpr const char* kMagic = "advgrasp-checkpoint v1";

void PutF32(std::ostream& out, float v) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  const char bytes[4] = {static_cast<char>(bits & 0xff),
                         static_cast<char>((bits >> 8) & 0xff),
                         static_cast<char>((bits >> 16) & 0xff),
                         static_cast<char>((bits >> 24) & 0xff)};
  out.write(bytes, 4);
}

float GetF32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw FormatError("checkpoint: truncated tensor data");
  }
  const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                             (static_cast<std::uint32_t>(bytes[1]) << 8) |
                             (static_cast<std::uint32_t>(bytes[2]) << 16) |
                             (static_cast<std::uint32_t>(bytes[3]) << 24);
  return std::bit_cast<float>(bits);
}

std::string ExpectLine(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0) {
    throw FormatError("checkpoint: expected '" + key + "' line");
  }
  return line.substr(key.size() + 1);
}

}  // namespace

void WriteCheckpoint(const Network& net, std::ostream& out) {
  const Architecture& arch = net.arch();
  out << kMagic << '\n';
  out << "arch " << arch.Describe() << '\n';
  out << "input " << arch.input.channels << ' ' << arch.input.height << ' '
      << arch.input.width << '\n';
  out << "outputs " << net.n_outputs() << '\n';
  out << "seed " << net.seed() << '\n';
  out << "tensors " << net.params().size() << '\n';
  std::size_t total = 0;
  for (const Tensor& t : net.params()) {
    out << "tensor " << t.name << ' ' << t.shape.size();
    for (int d : t.shape) out << ' ' << d;
    out << '\n';
    total += t.values.size();
  }
  out << "floats " << total << '\n';
  out << "data\n";
  for (const Tensor& t : net.params()) {
    for (float v : t.values) PutF32(out, v);
  }
}

Network ReadCheckpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw FormatError("checkpoint: bad magic line");
  }
  Architecture arch;
  try {
    arch = Architecture::Parse(ExpectLine(in, "arch"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  {
    std::istringstream fields(ExpectLine(in, "input"));
    fields >> arch.input.channels >> arch.input.height >> arch.input.width;
    if (!fields) throw FormatError("checkpoint: bad input line");
  }
  const int outputs = std::stoi(ExpectLine(in, "outputs"));
  const std::uint64_t seed = std::stoull(ExpectLine(in, "seed"));
  const std::size_t count = std::stoull(ExpectLine(in, "tensors"));
  std::vector<Tensor> params(count);
  std::size_t total = 0;
  for (Tensor& t : params) {
    std::istringstream fields(ExpectLine(in, "tensor"));
    std::size_t rank = 0;
    fields >> t.name >> rank;
    t.shape.resize(rank);
    std::size_t size = 1;
    for (int& d : t.shape) {
      fields >> d;
      size *= static_cast<std::size_t>(d);
    }
    if (!fields) throw FormatError("checkpoint: bad tensor line");
    t.values.resize(size);
    total += size;
  }
  if (std::stoull(ExpectLine(in, "floats")) != total) {
    throw FormatError("checkpoint: float count disagrees with tensor shapes");
  }
  if (!std::getline(in, line) || line != "data") {
    throw FormatError("checkpoint: missing data marker");
  }
  for (Tensor& t : params) {
    for (float& v : t.values) v = GetF32(in);
  }
  if (arch.n_outputs() != outputs) {
    throw FormatError("checkpoint: outputs disagree with architecture");
  }
  try {
    return Network(std::move(arch), seed, std::move(params));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Network& net, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    WriteCheckpoint(net, out);
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Network LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  return ReadCheckpoint(in);
}

}  // namespace advgrasp
