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

#include "advgrasp/dataset.h"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "absl/strings/escaping.h"
#include "advgrasp/errors.h"
#include "nlohmann/json.hpp"

namespace advgrasp {

namespace {

using nlohmann::json;

std::string EncodePatch(const Patch& patch) {
  std::string bytes(patch.pixels.size() * 4, '\0');
  for (std::size_t i = 0; i < patch.pixels.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &patch.pixels[i], 4);
    for (int b = 0; b < 4; ++b) {
      bytes[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  return absl::Base64Escape(bytes);
}

Patch DecodePatch(const std::string& text) {
  std::string bytes;
  if (!absl::Base64Unescape(text, &bytes)) {
    throw FormatError("patch is not valid base64");
  }
  Patch patch;
  if (bytes.size() != patch.pixels.size() * 4) {
    throw FormatError("patch has " + std::to_string(bytes.size()) +
                      " bytes, expected " +
                      std::to_string(patch.pixels.size() * 4));
  }
  for (std::size_t i = 0; i < patch.pixels.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b]))
              << (8 * b);
    }
    std::memcpy(&patch.pixels[i], &bits, 4);
  }
  return patch;
}

}  // namespace

std::string EncodeRecord(const EpisodeRecord& r) {
  json j;
  j["scene_seed"] = r.scene_seed;
  j["object_seed"] = r.object_seed;
  j["difficulty"] = std::string(DifficultyName(r.difficulty));
  j["x"] = r.grasp.x;
  j["y"] = r.grasp.y;
  j["theta_bin"] = r.grasp.theta_bin;
  j["grasp_patch"] = EncodePatch(r.grasp_patch);
  if (r.rotated_patch) j["rotated_patch"] = EncodePatch(*r.rotated_patch);
  j["grasp_success"] = r.grasp_success;
  j["grasp_margin"] = r.grasp_margin;
  if (r.adversary_kind) {
    j["adversary_kind"] = std::string(AdversaryKindName(*r.adversary_kind));
  }
  if (r.adversary_action) j["adversary_action"] = *r.adversary_action;
  if (r.adversary_success) j["adversary_success"] = *r.adversary_success;
  j["iteration"] = r.iteration;
  j["config_id"] = r.config_id;
  return j.dump();
}

EpisodeRecord DecodeRecord(const std::string& line) {
  EpisodeRecord r;
  try {
    const json j = json::parse(line);
    if (!j.is_object()) throw FormatError("record is not an object");
    r.scene_seed = j.at("scene_seed").get<std::uint64_t>();
    r.object_seed = j.at("object_seed").get<std::uint64_t>();
    const auto difficulty = ParseDifficulty(j.at("difficulty").get<std::string>());
    if (!difficulty) throw FormatError("unknown difficulty");
    r.difficulty = *difficulty;
    r.grasp.x = j.at("x").get<double>();
    r.grasp.y = j.at("y").get<double>();
    r.grasp.theta_bin = j.at("theta_bin").get<int>();
    if (r.grasp.theta_bin < 0 || r.grasp.theta_bin >= kNumAngleBins) {
      throw FormatError("theta_bin out of range");
    }
    r.grasp_patch = DecodePatch(j.at("grasp_patch").get<std::string>());
    r.grasp_patch.source_center = r.grasp.center();
    if (j.contains("rotated_patch")) {
      r.rotated_patch = DecodePatch(j.at("rotated_patch").get<std::string>());
      r.rotated_patch->source_center = r.grasp.center();
      r.rotated_patch->source_angle = r.grasp.angle();
    }
    r.grasp_success = j.at("grasp_success").get<bool>();
    r.grasp_margin = j.at("grasp_margin").get<double>();
    if (j.contains("adversary_kind")) {
      r.adversary_kind = ParseAdversaryKind(j.at("adversary_kind").get<std::string>());
      if (!r.adversary_kind) throw FormatError("unknown adversary_kind");
    }
    if (j.contains("adversary_action")) {
      r.adversary_action = j.at("adversary_action").get<int>();
    }
    if (j.contains("adversary_success")) {
      r.adversary_success = j.at("adversary_success").get<bool>();
    }
    r.iteration = j.at("iteration").get<int>();
    r.config_id = j.at("config_id").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
  const bool has_adversary = r.adversary_kind.has_value();
  if (has_adversary != r.adversary_action.has_value() ||
      has_adversary != r.adversary_success.has_value()) {
    throw FormatError("adversary fields must appear together");
  }
  if (has_adversary && !r.grasp_success) {
    throw FormatError("adversary attempt on a failed grasp");
  }
  if (r.rotated_patch.has_value() != r.grasp_success) {
    throw FormatError("rotated_patch must be present exactly on success");
  }
  if (has_adversary && (*r.adversary_action < 0 ||
                        *r.adversary_action >= NumActions(*r.adversary_kind))) {
    throw FormatError("adversary_action out of range");
  }
  return r;
}

void WriteDataset(std::span<const EpisodeRecord> records, std::ostream& out) {
  for (const EpisodeRecord& r : records) out << EncodeRecord(r) << '\n';
}

std::vector<EpisodeRecord> ReadDataset(std::istream& in) {
  std::vector<EpisodeRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    try {
      records.push_back(DecodeRecord(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return records;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void SaveDataset(std::span<const EpisodeRecord> records,
                 const std::filesystem::path& path) {
  std::ostringstream out;
  WriteDataset(records, out);
  WriteFileAtomic(path, out.str());
}

std::vector<EpisodeRecord> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return ReadDataset(in);
}

}  // namespace advgrasp
