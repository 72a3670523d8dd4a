/**************************************************************************
 * oracles.hpp
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

// Independent reference computations used only by the tests.

#pragma once

#include <cstdint>
#include <vector>

namespace oracle {

/// Shift-and-add multiplication in GF(2)[x] / (poly), bit by bit.
inline std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, std::uint32_t poly, unsigned width) {
    std::uint32_t acc = 0;
    for (unsigned i = 0; i < width; ++i) {
        if ((b >> i) & 1U) acc ^= a;
        a <<= 1U;
        if (a & (1U << width)) a ^= poly;
    }
    return acc;
}

/// a^e by repeated slow multiplication.
inline std::uint32_t slow_pow(std::uint32_t a, std::uint64_t e, std::uint32_t poly, unsigned width) {
    std::uint32_t r = 1;
    while (e != 0) {
        if (e & 1U) r = slow_mul(r, a, poly, width);
        a = slow_mul(a, a, poly, width);
        e >>= 1U;
    }
    return r;
}

/// Inverse by Fermat: a^(2^w - 2).
inline std::uint32_t slow_inv(std::uint32_t a, std::uint32_t poly, unsigned width) {
    return slow_pow(a, (std::uint64_t{1} << width) - 2, poly, width);
}

/// Value at x of the polynomial through (xs[j], ys[j]), by plain Lagrange.
inline std::uint32_t lagrange_eval(const std::vector<std::uint32_t>& xs, const std::vector<std::uint32_t>& ys,
                                   std::uint32_t x, std::uint32_t poly, unsigned width) {
    std::uint32_t sum = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        std::uint32_t num = 1, den = 1;
        for (std::size_t m = 0; m < xs.size(); ++m) {
            if (m == j) continue;
            num = slow_mul(num, x ^ xs[m], poly, width);
            den = slow_mul(den, xs[j] ^ xs[m], poly, width);
        }
        sum ^= slow_mul(ys[j], slow_mul(num, slow_inv(den, poly, width), poly, width), poly, width);
    }
    return sum;
}

} // namespace oracle
