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

#ifndef ADVGRASP_DATASET_H_
#define ADVGRASP_DATASET_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "advgrasp/episode.h"

namespace advgrasp {

// Newline-delimited records, one flat JSON object per episode. Patches are
// base64 strings of little-endian float32 values.
std::string EncodeRecord(const EpisodeRecord& record);
EpisodeRecord DecodeRecord(const std::string& line);

void WriteDataset(std::span<const EpisodeRecord> records, std::ostream& out);
// Throws FormatError naming the 1-based line of the first malformed record.
std::vector<EpisodeRecord> ReadDataset(std::istream& in);

void SaveDataset(std::span<const EpisodeRecord> records,
                 const std::filesystem::path& path);
std::vector<EpisodeRecord> LoadDataset(const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& data);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace advgrasp

#endif  // ADVGRASP_DATASET_H_
