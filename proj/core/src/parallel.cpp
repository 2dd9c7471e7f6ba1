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

#include "xlmimo/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace xlmimo
{
    std::size_t default_worker_count()
    {
        if (const char *env = std::getenv("XLMIMO_THREADS"))
        {
            try
            {
                long v = std::stol(env);
                if (v >= 1)
                    return std::size_t(v);
            }
            catch (...)
            {
            }
        }
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body, std::size_t workers)
    {
        if (workers == 0)
            workers = default_worker_count();
        workers = std::min(workers, n);
        if (workers <= 1)
        {
            for (std::size_t k = 0; k < n; ++k)
                body(k);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;

        auto worker = [&]()
        {
            for (;;)
            {
                std::size_t k = next.fetch_add(1);
                if (k >= n)
                    return;
                try
                {
                    body(k);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    next.store(n);
                }
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }
}
