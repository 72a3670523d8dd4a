/**************************************************************************
 * analysis_test.cpp
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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include <mdscache/analysis.hpp>

namespace mdscache {
namespace {

double dbinom(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// A(1) by summing over every subset T of the other K-1 users: each coded
// symbol of a requested file that is cached by exactly {k} u T is a symbol
// user k collects at level |T|+1.
double a1_by_subsets(double n, double m, int k, double r) {
    const double q = m / (r * n);
    double a = m / n;
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << (k - 1)); ++t) {
        const int size = std::popcount(t) + 1;
        a += r * std::pow(q, size - 1) * std::pow(1 - q, k - size + 1);
    }
    return a;
}

// Delivery loop on expected sizes in floating point, counting messages by
// enumerating subsets that touch a leader (round-robin demand).
double delivery_loop_rate(int n, double m, int k, double r) {
    const double q = m / (r * n);
    const int leaders = std::min(n, k);
    const std::uint64_t leader_mask = (std::uint64_t{1} << leaders) - 1;
    double acc = m / n, rate = 0.0;
    if (acc >= 1.0) return 0.0;
    for (int j = k; j >= 1; --j) {
        const double size = r * std::pow(q, j - 1) * std::pow(1 - q, k - j + 1);
        double msgs = 0, per_user = 0;
        for (std::uint64_t s = 1; s < (std::uint64_t{1} << k); ++s) {
            if (std::popcount(s) != j) continue;
            if (s & leader_mask) msgs += 1;
            if (s & 1U) per_user += 1;
        }
        if (acc + per_user * size >= 1.0) return rate + msgs * (1.0 - acc) / per_user;
        acc += per_user * size;
        rate += msgs * size;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Lower envelope at t of the corner points: min over bracketing pairs.
double envelope(int n, double m, int k) {
    const int rest = k - std::min(n, k);
    auto corner = [&](int t) { return (dbinom(k, t + 1) - dbinom(rest, t + 1)) / dbinom(k, t); };
    const double t = k * m / n;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= k; ++i) {
        for (int j = i; j <= k; ++j) {
            if (i > t || j < t) continue;
            const double v = i == j ? corner(i) : corner(i) + (corner(j) - corner(i)) * (t - i) / (j - i);
            best = std::min(best, v);
        }
    }
    return best;
}

struct Tuple {
    std::uint32_t n, k;
    Rational m, r;
};

Tuple random_tuple(std::mt19937_64& rng, std::uint32_t max_k = 10) {
    Tuple t;
    t.n = 1 + static_cast<std::uint32_t>(rng() % 20);
    t.k = 1 + static_cast<std::uint32_t>(rng() % max_k);
    t.m = Rational(static_cast<std::int64_t>(rng() % (4 * t.n + 1)), 4);
    t.r = Rational(static_cast<std::int64_t>(4 + rng() % 37), 4);
    if (t.r < t.m / t.n) t.r = t.m / t.n;
    return t;
}

TEST(AccumulateA, WorkedValues) {
    EXPECT_EQ(accumulate_A(4, 2, 1, 3, 2), Rational(1, 2));
    EXPECT_EQ(accumulate_A(3, 2, 1, 3, 2), Rational(19, 32));
    EXPECT_EQ(accumulate_A(2, 2, 1, 3, 2), Rational(37, 32));
    EXPECT_EQ(accumulate_A(2, 2, 1, 2, 1), Rational(3, 4));
    EXPECT_THROW(accumulate_A(0, 2, 1, 3, 2), InvalidParams);
    EXPECT_THROW(accumulate_A(5, 2, 1, 3, 2), InvalidParams);
}

TEST(AccumulateA, FirstLevelEqualsExpansion) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
        const auto tp = random_tuple(rng);
        EXPECT_EQ(accumulate_A(1, tp.n, tp.m, tp.k, tp.r), tp.r);
        EXPECT_NEAR(a1_by_subsets(tp.n, to_double(tp.m), static_cast<int>(tp.k), to_double(tp.r)), to_double(tp.r),
                    1e-9 * to_double(tp.r));
    }
}

TEST(FindS, Examples) {
    EXPECT_EQ(find_s(2, 1, 3, 2), 2U);
    EXPECT_EQ(find_s(2, 1, 2, 1), 1U);
    EXPECT_EQ(find_s(2, 2, 3, 2), 4U);
    const auto ev = evaluate_theorem(2, 1, 3, 2);
    EXPECT_TRUE(ev.A(ev.s + 1) < 1 && ev.A(ev.s) >= 1);
    EXPECT_EQ(ev.q, Rational(1, 4));
    EXPECT_EQ(ev.distinct, 2U);
}

TEST(RateMdsDec, WorkedValues) {
    EXPECT_EQ(rate_mds_dec(2, 1, 2, 1), Rational(3, 4));
    EXPECT_EQ(rate_mds_dec(2, 1, 2, 2), Rational(5, 8));
    EXPECT_EQ(rate_mds_dec(2, 1, 2, 3), Rational(7, 12));
    EXPECT_EQ(rate_mds_dec(2, 1, 2, 4), Rational(9, 16));
    EXPECT_EQ(rate_mds_dec(2, 1, 3, 2), Rational(45, 64));
    EXPECT_EQ(rate_mds_dec(2, 1, 3, Rational(3, 2)), Rational(25, 36));
    for (std::int64_t r : {1, 2, 3, 4, 10, 100}) {
        EXPECT_EQ(rate_mds_dec(2, 1, 2, r), Rational(1, 2) + Rational(1, 4 * r));
    }
}

TEST(RateMdsDec, Endpoints) {
    for (std::uint32_t n : {1U, 3U, 7U}) {
        for (std::uint32_t k : {1U, 4U, 9U}) {
            EXPECT_EQ(rate_mds_dec(n, 0, k, 1), Rational(std::min(n, k)));
            EXPECT_EQ(rate_mds_dec(n, 0, k, 5), Rational(std::min(n, k)));
            EXPECT_EQ(rate_mds_dec(n, n, k, 1), 0);
        }
    }
}

TEST(RateMdsDec, DomainErrors) {
    EXPECT_THROW(rate_mds_dec(2, 3, 2, 2), InvalidParams);
    EXPECT_THROW(rate_mds_dec(2, 1, 2, Rational(1, 2)), InvalidParams);
    EXPECT_THROW(rate_mds_dec(0, 0, 2, 1), InvalidParams);
    EXPECT_THROW(rate_mds_dec_for_demand(2, 1, 3, 2, 3), InvalidParams);
}

TEST(RateMdsDec, MatchesFloatingDeliveryLoop) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 200; ++t) {
        const auto tp = random_tuple(rng);
        const double want = delivery_loop_rate(static_cast<int>(tp.n), to_double(tp.m), static_cast<int>(tp.k),
                                               to_double(tp.r));
        const double got = to_double(rate_mds_dec(tp.n, tp.m, tp.k, tp.r));
        EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, want))
            << "N=" << tp.n << " M=" << tp.m << " K=" << tp.k << " r=" << tp.r;
    }
}

TEST(RateMdsDec, PerDemandVariant) {
    EXPECT_EQ(rate_mds_dec_for_demand(2, 1, 3, 2, 2), rate_mds_dec(2, 1, 3, 2));
    EXPECT_EQ(rate_mds_dec_for_demand(5, 0, 3, 1, 1), 1);
    EXPECT_LT(rate_mds_dec_for_demand(2, 1, 3, 2, 1), rate_mds_dec(2, 1, 3, 2));
    EXPECT_FALSE(evaluate_theorem(2, 1, 3, 2, 1).worst_case);
}

TEST(RateUncodedDec, Values) {
    EXPECT_EQ(rate_uncoded_dec(2, 1, 2), Rational(3, 4));
    EXPECT_EQ(rate_uncoded_dec(2, 1, 3), Rational(3, 4));
    EXPECT_EQ(rate_uncoded_dec(5, 5, 4), 0);
    EXPECT_EQ(rate_uncoded_dec(5, 0, 4), 4);
    EXPECT_EQ(rate_uncoded_dec(3, 0, 9), 3);
    // (N-M)/M (1 - ((N-M)/N)^J) at N=4, M=1, K=2: 3 (1 - 9/16) = 21/16.
    EXPECT_EQ(rate_uncoded_dec(4, 1, 2), Rational(21, 16));
}

TEST(RateUncodedCen, CornersAndEnvelope) {
    EXPECT_EQ(rate_uncoded_cen(2, 1, 2), Rational(1, 2));
    EXPECT_EQ(rate_uncoded_cen(20, 5, 4), Rational(3, 2));
    EXPECT_EQ(rate_uncoded_cen(6, 6, 4), 0);
    EXPECT_EQ(rate_uncoded_cen(6, 0, 4), 4);
    std::mt19937_64 rng(23);
    for (int t = 0; t < 200; ++t) {
        const std::uint32_t n = 1 + rng() % 12, k = 1 + rng() % 10;
        const Rational m(static_cast<std::int64_t>(rng() % (8 * n + 1)), 8);
        EXPECT_NEAR(to_double(rate_uncoded_cen(n, m, k)), envelope(static_cast<int>(n), to_double(m), static_cast<int>(k)),
                    1e-9)
            << "N=" << n << " M=" << m << " K=" << k;
    }
}

TEST(RateRelations, UnitExpansionIsUncodedScheme) {
    for (std::uint32_t n : {2U, 5U, 20U, 100U}) {
        for (std::uint32_t k : {2U, 3U, 4U, 8U}) {
            for (const Rational& m : {Rational(n, 10), Rational(n, 4), Rational(n, 2), Rational(1), Rational(n)}) {
                EXPECT_EQ(rate_mds_dec(n, m, k, 1), rate_uncoded_dec(n, m, k)) << n << " " << m << " " << k;
            }
        }
    }
}

TEST(RateRelations, SomeExpansionBeatsUncoded) {
    const auto grid = rational_range(1, 10, Rational(1, 4));
    for (std::uint32_t n : {2U, 5U, 20U}) {
        for (std::uint32_t k : {2U, 3U, 4U, 8U}) {
            for (const Rational& m : {Rational(n, 10), Rational(n, 4), Rational(n, 2)}) {
                EXPECT_LE(best_r(n, m, k, grid).rate, rate_uncoded_dec(n, m, k));
            }
        }
    }
}

TEST(RateRelations, CentralizedLimit) {
    EXPECT_EQ(rate_mds_dec(2, 1, 2, 1000) - rate_uncoded_cen(2, 1, 2), Rational(1, 4000));
}

TEST(RateRelations, NotMonotoneInExpansion) {
    EXPECT_LT(rate_mds_dec(2, 1, 3, Rational(3, 2)), rate_mds_dec(2, 1, 3, 2));
    EXPECT_LT(rate_mds_dec(2, 1, 3, 2), rate_mds_dec(2, 1, 3, 1));
}

TEST(RateRelations, LargeLibraryShape) {
    Rational prev_gap = -1;
    for (std::uint32_t k = 10; k <= 50; k += 10) {
        const auto r1 = rate_mds_dec(100, 2, k, 1), r2 = rate_mds_dec(100, 2, k, 2), r10 = rate_mds_dec(100, 2, k, 10);
        EXPECT_LT(r10, r2);
        EXPECT_LT(r2, r1);
        EXPECT_GE(r1 - r10, prev_gap);
        prev_gap = r1 - r10;
    }
}

TEST(BestR, Examples) {
    const auto grid = rational_range(1, 10, Rational(1, 4));
    ASSERT_EQ(grid.size(), 37U);
    const auto best = best_r(20, 12, 4, grid);
    EXPECT_EQ(best.expansion, Rational(3, 2));
    EXPECT_EQ(best.rate, Rational(356, 625));
    EXPECT_EQ(rate_mds_dec(20, 12, 4, 1), Rational(406, 625));
    EXPECT_LT(best.rate, rate_mds_dec(20, 12, 4, 10));

    const auto ints = rational_range(1, 100, 1);
    EXPECT_EQ(best_r(2, 1, 2, ints).expansion, 100);
    const std::vector<Rational> one{1};
    EXPECT_EQ(best_r(5, 2, 3, one).rate, rate_uncoded_dec(5, 2, 3));
    EXPECT_THROW(best_r(2, 1, 2, std::vector<Rational>{}), InvalidParams);
    // Ties resolve toward the smaller r: M = N gives rate 0 everywhere.
    EXPECT_EQ(best_r(3, 3, 2, ints).expansion, 1);
}

} // namespace
} // namespace mdscache
