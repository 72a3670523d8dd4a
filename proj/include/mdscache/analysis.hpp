/**************************************************************************
 * analysis.hpp
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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cache_model.hpp"
#include "errors.hpp"
#include "rational.hpp"

// Closed-form delivery rates, all in exact rational arithmetic.
//
//   q      = M / (rN)
//   A(x)   = M/N + sum_{j=x}^{K} r q^(j-1) (1-q)^(K-j+1) C(K-1, j-1)
//   s      : A(s+1) < 1 <= A(s)
//   R_dec  = sum_{j=s+1}^{K} r q^(j-1) (1-q)^(K-j+1) (C(K,j) - C(K-J,j))
//            + (1 - A(s+1)) / C(K-1, s-1) * (C(K,s) - C(K-J,s))
//
// with J = min(N, K) for the worst case, or N(d) for a concrete demand.

namespace mdscache {

namespace detail {

inline void require_rate_inputs(std::uint32_t n, std::uint32_t k, const Rational& m, const Rational& r) {
    const auto v = validate_rate_inputs(n, k, m, r);
    if (v.empty()) return;
    std::string msg = "invalid rate inputs:";
    for (const auto& e : v) msg += "\n  " + e.message;
    throw InvalidParams(msg);
}

// r q^(j-1) (1-q)^(K-j+1): normalized size of one block with |A| = j-1.
inline Rational level_term(const Rational& r, const Rational& q, std::uint32_t k, std::uint32_t j) {
    return r * power(q, j - 1) * power(1 - q, k - j + 1);
}

} // namespace detail

/// A(x); x ranges over 1..K+1 (A(K+1) = M/N).
inline Rational accumulate_A(std::uint32_t x, std::uint32_t num_files, const Rational& cache_size,
                             std::uint32_t num_active, const Rational& expansion) {
    detail::require_rate_inputs(num_files, num_active, cache_size, expansion);
    if (x < 1 || x > num_active + 1) throw InvalidParams("A(x) needs 1 <= x <= K+1");
    const Rational q = cache_size / (expansion * num_files);
    Rational a = cache_size / num_files;
    for (std::uint32_t j = x; j <= num_active; ++j) {
        a += detail::level_term(expansion, q, num_active, j) * Rational(binomial(num_active - 1, j - 1));
    }
    return a;
}

struct TheoremEval {
    Rational q;
    std::uint32_t distinct = 0;        // J, or N(d) for the per-demand variant
    bool worst_case = true;
    std::uint32_t s = 0;               // K+1 when caches are full (nothing sent)
    std::vector<Rational> A_values;    // A(x) for x = s..K+1; A_values[x - s]
    Rational rate;

    bool full_cache(std::uint32_t num_active) const { return s == num_active + 1; }
    const Rational& A(std::uint32_t x) const { return A_values.at(x - s); }
};

/// Evaluates the achievable rate. `distinct` overrides J = min(N, K) with
/// N(d) for a specific demand vector.
inline TheoremEval evaluate_theorem(std::uint32_t num_files, const Rational& cache_size,
                                    std::uint32_t num_active, const Rational& expansion,
                                    std::optional<std::uint32_t> distinct = std::nullopt) {
    detail::require_rate_inputs(num_files, num_active, cache_size, expansion);
    const std::uint32_t k = num_active;
    TheoremEval ev;
    ev.q = cache_size / (expansion * num_files);
    ev.worst_case = !distinct.has_value();
    ev.distinct = distinct.value_or(std::min(num_files, num_active));
    if (ev.distinct < 1 || ev.distinct > std::min(num_files, num_active)) {
        throw InvalidParams("number of distinct demands must lie in [1, min(N, K)]");
    }

    // A(K+1), A(K), ..., walking down until A reaches 1.
    std::vector<Rational> a_desc{cache_size / num_files};
    std::uint32_t s = k + 1;
    if (a_desc.back() < 1) {
        for (std::uint32_t x = k; x >= 1; --x) {
            a_desc.push_back(a_desc.back() + detail::level_term(expansion, ev.q, k, x) *
                                                 Rational(binomial(k - 1, x - 1)));
            if (a_desc.back() >= 1) {
                s = x;
                break;
            }
        }
        if (s == k + 1) throw Error("accumulator never reached 1; requires r >= 1");
    }
    ev.s = s;
    ev.A_values.assign(a_desc.rbegin(), a_desc.rend());

    if (s == k + 1) {
        ev.rate = 0;
        return ev;
    }
    const std::int64_t rest = static_cast<std::int64_t>(k) - ev.distinct;
    Rational rate = 0;
    for (std::uint32_t j = s + 1; j <= k; ++j) {
        rate += detail::level_term(expansion, ev.q, k, j) * Rational(binomial(k, j) - binomial(rest, j));
    }
    rate += (1 - ev.A(s + 1)) / Rational(binomial(k - 1, s - 1)) * Rational(binomial(k, s) - binomial(rest, s));
    ev.rate = rate;
    return ev;
}

/// Stopping index s with A(s+1) < 1 <= A(s); K+1 when M = N.
inline std::uint32_t find_s(std::uint32_t num_files, const Rational& cache_size, std::uint32_t num_active,
                            const Rational& expansion) {
    return evaluate_theorem(num_files, cache_size, num_active, expansion).s;
}

/// Worst-case normalized rate of MDS-coded prefetching with an (rF, F) code.
inline Rational rate_mds_dec(std::uint32_t num_files, const Rational& cache_size, std::uint32_t num_active,
                             const Rational& expansion) {
    return evaluate_theorem(num_files, cache_size, num_active, expansion).rate;
}

/// Same scheme for a concrete demand with N(d) distinct files.
inline Rational rate_mds_dec_for_demand(std::uint32_t num_files, const Rational& cache_size,
                                        std::uint32_t num_active, const Rational& expansion,
                                        std::uint32_t distinct_files) {
    return evaluate_theorem(num_files, cache_size, num_active, expansion, distinct_files).rate;
}

/// Decentralized uncoded prefetching: (N-M)/M (1 - ((N-M)/N)^min(N,K)).
/// At M = 0 the limit min(N, K) is returned.
inline Rational rate_uncoded_dec(std::uint32_t num_files, const Rational& cache_size, std::uint32_t num_active) {
    detail::require_rate_inputs(num_files, num_active, cache_size, Rational(std::max<Rational>(1, cache_size / num_files)));
    const auto j = std::min(num_files, num_active);
    if (cache_size == 0) return Rational(j);
    const Rational n(num_files);
    return (n - cache_size) / cache_size * (1 - power((n - cache_size) / n, j));
}

/// Centralized uncoded prefetching at integer t = KM/N, and the lower convex
/// envelope of those corner points in between.
inline Rational rate_uncoded_cen(std::uint32_t num_files, const Rational& cache_size, std::uint32_t num_active) {
    detail::require_rate_inputs(num_files, num_active, cache_size, Rational(std::max<Rational>(1, cache_size / num_files)));
    const std::uint32_t k = num_active;
    const std::int64_t rest = static_cast<std::int64_t>(k) - std::min(num_files, num_active);
    auto corner = [&](std::uint32_t t) {
        return Rational(binomial(k, t + 1) - binomial(rest, t + 1)) / Rational(binomial(k, t));
    };
    const Rational t = Rational(k) * cache_size / num_files;
    if (is_integer(t)) return corner(numerator(t).convert_to<std::uint32_t>());

    // Lower convex hull over (t, R(t)), t = 0..K (monotone chain).
    std::vector<std::pair<Rational, Rational>> hull;
    auto cross = [](const auto& o, const auto& a, const auto& b) {
        return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    for (std::uint32_t i = 0; i <= k; ++i) {
        std::pair<Rational, Rational> p{Rational(i), corner(i)};
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
        hull.push_back(std::move(p));
    }
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (t <= hull[i].first) {
            const auto& [t0, r0] = hull[i - 1];
            const auto& [t1, r1] = hull[i];
            return r0 + (r1 - r0) * (t - t0) / (t1 - t0);
        }
    }
    return hull.back().second;
}

struct BestExpansion {
    Rational expansion;
    Rational rate;
};

/// Grid point minimizing rate_mds_dec; ties go to the smaller r.
inline BestExpansion best_r(std::uint32_t num_files, const Rational& cache_size, std::uint32_t num_active,
                            std::span<const Rational> grid) {
    if (grid.empty()) throw InvalidParams("empty r grid");
    std::optional<BestExpansion> best;
    for (const auto& r : grid) {
        const Rational rate = rate_mds_dec(num_files, cache_size, num_active, r);
        if (!best || rate < best->rate || (rate == best->rate && r < best->expansion)) best = BestExpansion{r, rate};
    }
    return *best;
}

/// lo, lo+step, ..., up to and including hi when it lands on the grid.
inline std::vector<Rational> rational_range(const Rational& lo, const Rational& hi, const Rational& step) {
    if (step <= 0) throw InvalidParams("range step must be positive");
    std::vector<Rational> out;
    for (Rational v = lo; v <= hi; v += step) out.push_back(v);
    return out;
}

} // namespace mdscache
