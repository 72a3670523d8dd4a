/**************************************************************************
 * placement.hpp
 *
 * Copyright 2026 The mdscache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "cache_model.hpp"
#include "rational.hpp"

namespace mdscache {

/// SplitMix64 output function.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Master seed of the placement phase. The stream of pair (user, file) is
/// std::mt19937_64 seeded with mix64(master ^ mix64((user << 32) | file)),
/// so each pair's cache is fixed by the master seed alone.
struct PlacementSeed {
    std::uint64_t master = 0;

    std::uint64_t stream(std::uint32_t user, std::uint32_t file) const {
        return mix64(master ^ mix64((std::uint64_t{user} << 32) | file));
    }
};

/// Unbiased integer in [0, bound). std::uniform_int_distribution is not
/// portable across standard libraries, so replay files would differ.
template <typename Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = engine();
        if (x >= threshold) return x % bound;
    }
}

/// Uniform `count`-subset of [0, universe), sorted (partial Fisher-Yates).
template <typename Engine>
std::vector<std::uint32_t> sample_without_replacement(Engine& engine, std::uint64_t universe,
                                                      std::uint64_t count) {
    std::vector<std::uint32_t> pool(universe);
    std::iota(pool.begin(), pool.end(), 0U);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto j = i + uniform_below(engine, universe - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/// Caches of the given (user, file) pairs; every pair draws M F / N coded
/// indices out of [0, rF) from its own stream.
inline CacheContents prefetch(const SystemParams& params, PlacementSeed seed,
                              std::span<const std::uint32_t> users, std::span<const std::uint32_t> files) {
    require_valid(params);
    const auto universe = params.coded_len();
    const auto count = params.cached_per_file();
    CacheContents cache;
    for (auto user : users) {
        if (user >= params.num_provisioned) throw InvalidParams("user id outside [0, K')");
        for (auto file : files) {
            if (file >= params.num_files) throw InvalidParams("file id outside [0, N)");
            std::mt19937_64 engine(seed.stream(user, file));
            cache.set(user, file, sample_without_replacement(engine, universe, count));
        }
    }
    return cache;
}

/// Full placement: all K' users, all N files.
inline CacheContents prefetch(const SystemParams& params, PlacementSeed seed) {
    std::vector<std::uint32_t> users(params.num_provisioned), files(params.num_files);
    std::iota(users.begin(), users.end(), 0U);
    std::iota(files.begin(), files.end(), 0U);
    return prefetch(params, seed, users, files);
}

/// Random K of the K' provisioned users, ascending.
template <typename Engine>
std::vector<std::uint32_t> choose_active_users(const SystemParams& params, Engine& engine) {
    return sample_without_replacement(engine, params.num_provisioned, params.num_active);
}

/// Splits [0, rF) of `file` by which active users cache each index.
/// `active[k]` is the provisioned id of active position k.
inline SubfilePartition partition_subfiles(const CacheContents& cache, std::span<const std::uint32_t> active,
                                           std::uint32_t file, const SystemParams& params) {
    if (active.size() > 63) throw InvalidParams("at most 63 active users supported for subset keys");
    SubfilePartition part;
    part.file = file;
    part.coded_len = params.coded_len();
    std::vector<std::uint64_t> mask(part.coded_len, 0);
    for (std::size_t k = 0; k < active.size(); ++k) {
        for (auto idx : cache.indices(active[k], file)) {
            if (idx >= part.coded_len) throw Error("cached index outside [0, rF)");
            mask[idx] |= std::uint64_t{1} << k;
        }
    }
    for (std::uint64_t i = 0; i < part.coded_len; ++i) {
        part.blocks[SubsetKey(mask[i])].push_back(static_cast<std::uint32_t>(i));
    }
    return part;
}

/// E|W'_{n,S}| = rF q^|S| (1-q)^(K-|S|).
inline Rational expected_block_size(const SystemParams& params, unsigned subset_size) {
    const Rational q = params.cache_probability();
    return params.expansion * params.file_len * power(q, subset_size) *
           power(1 - q, params.num_active - subset_size);
}

} // namespace mdscache
