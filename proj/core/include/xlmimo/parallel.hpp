// SPDX-License-Identifier: Apache-2.0
//
// xlmimo: near-field XL-MIMO channel simulation and estimation toolkit
// Copyright (C) 2026 The xlmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace xlmimo
{
    /// Worker count from XLMIMO_THREADS, else hardware concurrency (at least 1).
    std::size_t default_worker_count();

    /// Runs body(k) for k in [0, n) on up to `workers` threads. Work items are claimed
    /// dynamically; callers write results into per-item slots so output order is fixed.
    /// The first exception thrown by any item is rethrown after all workers join.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body, std::size_t workers = 0);
}
