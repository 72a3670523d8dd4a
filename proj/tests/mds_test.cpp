/**************************************************************************
 * mds_test.cpp
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
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <mdscache/cache_model.hpp>
#include <mdscache/mds.hpp>

#include "oracles.hpp"

namespace mdscache {
namespace {

std::vector<Symbol> random_message(std::mt19937_64& rng, std::size_t len, unsigned width = 16) {
    std::vector<Symbol> m(len);
    for (auto& s : m) s = static_cast<Symbol>(rng() & ((1U << width) - 1));
    return m;
}

TEST(Mds, UnitExpansionIsIdentity) {
    std::mt19937_64 rng(1);
    const auto msg = random_message(rng, 33);
    EXPECT_EQ(mds_encode(msg, {33, 33}), msg);
}

TEST(Mds, SystematicPrefix) {
    std::mt19937_64 rng(2);
    const auto msg = random_message(rng, 20);
    const auto cw = mds_encode(msg, {20, 50});
    ASSERT_EQ(cw.size(), 50U);
    EXPECT_TRUE(std::equal(msg.begin(), msg.end(), cw.begin()));
}

TEST(Mds, AnyFourOfEightExhaustive) {
    const CodecConfig cfg{4, 8};
    const ReedSolomonCodec codec(cfg);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        const auto msg = random_message(rng, 4);
        const auto cw = codec.encode(msg);
        int subsets = 0;
        for_each_subset(8, 4, [&](SubsetKey s) {
            std::vector<CodedPoint> pts;
            for (auto i : s.members()) pts.push_back({i, cw[i]});
            ASSERT_EQ(codec.decode(pts), msg) << to_string(s);
            ++subsets;
        });
        EXPECT_EQ(subsets, 70);
    }
}

TEST(Mds, DecodeFromOddIndices) {
    std::mt19937_64 rng(4);
    const auto msg = random_message(rng, 4);
    const auto cw = mds_encode(msg, {4, 8});
    const std::vector<CodedPoint> pts{{1, cw[1]}, {3, cw[3]}, {5, cw[5]}, {7, cw[7]}};
    EXPECT_EQ(mds_decode(pts, {4, 8}), msg);
}

TEST(Mds, DecodeSystematicPrefixReturnsSymbols) {
    const std::vector<CodedPoint> pts{{0, 10}, {1, 20}, {2, 30}};
    EXPECT_EQ(mds_decode(pts, {3, 9}), (std::vector<Symbol>{10, 20, 30}));
}

TEST(Mds, DropThirtyTwoOfNinetySix) {
    std::mt19937_64 rng(5);
    const CodecConfig cfg{64, 96};
    const ReedSolomonCodec codec(cfg);
    for (int t = 0; t < 5; ++t) {
        const auto msg = random_message(rng, 64);
        const auto cw = codec.encode(msg);
        std::vector<std::uint64_t> idx(96);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<CodedPoint> pts;
        for (int i = 0; i < 64; ++i) pts.push_back({idx[i], cw[idx[i]]});
        EXPECT_EQ(codec.decode(pts), msg);
    }
}

TEST(Mds, ExtraPointsAreAccepted) {
    std::mt19937_64 rng(6);
    const auto msg = random_message(rng, 8);
    const auto cw = mds_encode(msg, {8, 16});
    std::vector<CodedPoint> pts;
    for (std::uint64_t i = 3; i < 16; ++i) pts.push_back({i, cw[i]});
    EXPECT_EQ(mds_decode(pts, {8, 16}), msg);
}

TEST(Mds, Errors) {
    const CodecConfig cfg{4, 8};
    const std::vector<CodedPoint> three{{0, 1}, {2, 2}, {5, 3}};
    EXPECT_THROW(mds_decode(three, cfg), InsufficientSymbols);
    try {
        mds_decode(three, cfg);
    } catch (const InsufficientSymbols& e) {
        EXPECT_EQ(e.have(), 3U);
        EXPECT_EQ(e.need(), 4U);
    }
    EXPECT_THROW(mds_decode(std::vector<CodedPoint>{{0, 1}, {1, 1}, {2, 1}, {8, 1}}, cfg), CodecError);
    EXPECT_THROW(mds_decode(std::vector<CodedPoint>{{0, 1}, {1, 1}, {1, 1}, {2, 1}}, cfg), CodecError);
    EXPECT_THROW(mds_encode(std::vector<Symbol>(3), cfg), CodecError);
    EXPECT_THROW(ReedSolomonCodec({4, 3}), CodecError);
    EXPECT_THROW(ReedSolomonCodec({0, 3}), CodecError);
    EXPECT_THROW(ReedSolomonCodec({4096, 65536}), CodecError);
    EXPECT_NO_THROW(ReedSolomonCodec({16, 65535}));
    EXPECT_THROW(ReedSolomonCodec({16, 256, 8, kPrimitivePoly8}), CodecError);
    EXPECT_THROW(mds_encode(std::vector<Symbol>{1, 2, 300}, {3, 6, 8, kPrimitivePoly8}), CodecError);
}

TEST(Mds, MatchesPlainLagrangeConstruction) {
    // Codeword symbol i is the interpolant through (alpha^t, m_t) evaluated at alpha^i.
    std::mt19937_64 rng(7);
    for (unsigned width : {8U, 16U}) {
        const CodecConfig cfg{5, 12, width, default_primitive_poly(width)};
        const auto msg = random_message(rng, 5, width);
        const auto cw = mds_encode(msg, cfg);
        std::vector<std::uint32_t> xs, ys(msg.begin(), msg.end());
        for (std::uint64_t t = 0; t < 5; ++t) xs.push_back(oracle::slow_pow(2, t, cfg.primitive_poly, width));
        for (std::uint64_t i = 0; i < 12; ++i) {
            const auto x = oracle::slow_pow(2, i, cfg.primitive_poly, width);
            EXPECT_EQ(cw[i], oracle::lagrange_eval(xs, ys, x, cfg.primitive_poly, width)) << "index " << i;
        }
    }
}

TEST(Mds, GeneratorRowsReproduceCodeword) {
    std::mt19937_64 rng(8);
    const ReedSolomonCodec codec({6, 15});
    const auto msg = random_message(rng, 6);
    const auto cw = codec.encode(msg);
    for (std::uint64_t i = 0; i < 15; ++i) {
        const auto row = codec.generator_row(i);
        Symbol acc = 0;
        for (std::size_t j = 0; j < row.size(); ++j) acc ^= codec.field().mul(row[j], msg[j]);
        EXPECT_EQ(acc, cw[i]);
    }
}

TEST(Mds, RandomErasurePatternsRoundTrip) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 60; ++t) {
        const std::uint64_t f = 1 + rng() % 128;
        const std::uint64_t n = f + rng() % (f + 1);
        const unsigned width = (n <= 255 && rng() % 2 == 0) ? 8U : 16U;
        const CodecConfig cfg{f, n, width, default_primitive_poly(width)};
        const auto msg = random_message(rng, f, width);
        const auto cw = mds_encode(msg, cfg);
        std::vector<std::uint64_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<CodedPoint> pts;
        for (std::uint64_t i = 0; i < f; ++i) pts.push_back({idx[i], cw[idx[i]]});
        ASSERT_EQ(mds_decode(pts, cfg), msg) << "F=" << f << " n=" << n << " w=" << width;
    }
}

TEST(Mds, ConfigJsonRoundTrip) {
    const CodecConfig cfg{64, 96, 8, kPrimitivePoly8};
    const nlohmann::json j = cfg;
    EXPECT_EQ(j["generator"]["primitive_poly"], "0x11d");
    EXPECT_EQ(j.get<CodecConfig>(), cfg);
}

} // namespace
} // namespace mdscache
