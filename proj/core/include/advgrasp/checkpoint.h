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

#ifndef ADVGRASP_CHECKPOINT_H_
#define ADVGRASP_CHECKPOINT_H_

#include <filesystem>
#include <iosfwd>

#include "advgrasp/neural.h"

namespace advgrasp {

// Text manifest (architecture, outputs, seed, tensor names and shapes)
// followed by every tensor as little-endian float32, in manifest order.
void WriteCheckpoint(const Network& net, std::ostream& out);
Network ReadCheckpoint(std::istream& in);

void SaveCheckpoint(const Network& net, const std::filesystem::path& path);
Network LoadCheckpoint(const std::filesystem::path& path);

}  // namespace advgrasp

#endif  // ADVGRASP_CHECKPOINT_H_
