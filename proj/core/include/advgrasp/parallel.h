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

#ifndef ADVGRASP_PARALLEL_H_
#define ADVGRASP_PARALLEL_H_

#include <functional>

namespace advgrasp {

// Runs fn(i) for every i in [0, n) on up to hardware_concurrency threads.
// Each index is visited exactly once; callers write results into slot i so
// the outcome never depends on scheduling.
void ParallelFor(int n, const std::function<void(int)>& fn);

}  // namespace advgrasp

#endif  // ADVGRASP_PARALLEL_H_
