/**************************************************************************
 * cache_model_test.cpp
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

#include <set>

#include <gtest/gtest.h>

#include <mdscache/cache_model.hpp>

namespace mdscache {
namespace {

SystemParams params(std::uint32_t n, std::uint32_t k, Rational m, Rational r, std::uint64_t f) {
    return SystemParams{n, k, k, std::move(m), std::move(r), f, 16};
}

bool mentions(const std::vector<Violation>& vs, const std::string& text) {
    for (const auto& v : vs) {
        if (v.message.find(text) != std::string::npos) return true;
    }
    return false;
}

TEST(Rational, Binomial) {
    EXPECT_EQ(binomial(5, 2), 10);
    EXPECT_EQ(binomial(10, 0), 1);
    EXPECT_EQ(binomial(3, 4), 0);
    EXPECT_EQ(binomial(3, -1), 0);
    EXPECT_EQ(binomial(60, 30), BigInt("118264581564861424"));
    EXPECT_EQ(binomial(100, 50), BigInt("100891344545564193334812497256"));
}

TEST(Rational, ParseAndFormat) {
    EXPECT_EQ(parse_rational("3/2"), Rational(3, 2));
    EXPECT_EQ(parse_rational("1.5"), Rational(3, 2));
    EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
    EXPECT_EQ(parse_rational("7"), Rational(7));
    EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
    EXPECT_THROW(parse_rational("abc"), InvalidParams);
    EXPECT_THROW(parse_rational("1/0"), InvalidParams);
    EXPECT_THROW(parse_rational(""), InvalidParams);

    EXPECT_EQ(to_string(Rational(45, 64)), "45/64");
    EXPECT_EQ(to_string(Rational(4)), "4");
    EXPECT_EQ(to_decimal(Rational(45, 64)), "0.703125");
    EXPECT_EQ(to_decimal(Rational(2, 3)), "0.666666666667");
    EXPECT_EQ(to_decimal(Rational(1, 8)), "0.125");
    EXPECT_EQ(to_decimal(Rational(0)), "0");
    EXPECT_EQ(to_decimal(Rational(12)), "12");
}

TEST(Rational, FloorCeil) {
    EXPECT_EQ(rational_floor(Rational(7, 2)), 3);
    EXPECT_EQ(rational_ceil(Rational(7, 2)), 4);
    EXPECT_EQ(rational_floor(Rational(-7, 2)), -4);
    EXPECT_EQ(rational_ceil(Rational(-7, 2)), -3);
    EXPECT_EQ(rational_ceil(Rational(4)), 4);
}

TEST(SystemParams, ValidExamples) {
    EXPECT_TRUE(validate(params(2, 2, 1, 1, 4)).empty());
    EXPECT_TRUE(validate(params(2, 3, 1, 2, 32)).empty());
    EXPECT_TRUE(validate(params(100, 50, 2, 10, 50)).empty());
    EXPECT_EQ(params(2, 3, 1, 2, 32).cache_probability(), Rational(1, 4));
    EXPECT_EQ(params(2, 3, 1, 2, 32).cached_per_file(), 16U);
    EXPECT_EQ(params(2, 3, 1, 2, 32).coded_len(), 64U);
}

TEST(SystemParams, Violations) {
    EXPECT_TRUE(mentions(validate(params(2, 2, 3, 1, 4)), "M <= N"));
    EXPECT_TRUE(mentions(validate(params(2, 2, 1, Rational(1, 2), 4)), "r >= 1"));
    EXPECT_TRUE(mentions(validate(params(4, 2, -1, 1, 4)), "M >= 0"));
    EXPECT_TRUE(mentions(validate(params(0, 2, 0, 1, 4)), "N >= 1"));
    EXPECT_TRUE(mentions(validate(params(2, 0, 0, 1, 4)), "K >= 1"));

    const auto vs = validate(params(2, 2, 1, Rational(3, 2), 7));
    EXPECT_TRUE(mentions(vs, "rF is an integer"));
    EXPECT_TRUE(mentions(vs, "MF/N is an integer"));
    EXPECT_TRUE(mentions(vs, "smallest feasible F' >= F is 8"));

    auto p = params(4, 5, 1, 1, 4);
    p.num_provisioned = 3;
    EXPECT_TRUE(mentions(validate(p), "K <= K'"));
    p = params(4, 2, 1, 1, 4);
    p.field_width = 12;
    EXPECT_FALSE(validate(p).empty());
    EXPECT_THROW(require_valid(params(2, 2, 3, 1, 4)), InvalidParams);
}

TEST(SystemParams, SmallestFeasibleFileLen) {
    EXPECT_EQ(smallest_feasible_file_len(1, 2, Rational(3, 2), 7), 8U);
    EXPECT_EQ(smallest_feasible_file_len(12, 20, Rational(5, 4), 1), 20U);
    EXPECT_EQ(smallest_feasible_file_len(12, 20, Rational(5, 4), 20), 20U);
    EXPECT_EQ(smallest_feasible_file_len(0, 3, 1, 5), 5U);
}

TEST(RequestVector, DistinctAndWorstCase) {
    EXPECT_EQ(distinct_requests({{0, 1, 0}}), 2U);
    EXPECT_EQ(distinct_requests({{2, 2, 2, 2}}), 1U);
    EXPECT_EQ(worst_case_demand(2, 3), (RequestVector{{0, 1, 0}}));
    EXPECT_EQ(worst_case_demand(5, 3), (RequestVector{{0, 1, 2}}));
    EXPECT_EQ(distinct_requests(worst_case_demand(7, 4)), 4U);

    const auto p = params(2, 3, 1, 2, 32);
    EXPECT_TRUE(validate(RequestVector{{0, 1, 1}}, p).empty());
    EXPECT_FALSE(validate(RequestVector{{0, 1}}, p).empty());
    EXPECT_FALSE(validate(RequestVector{{0, 1, 2}}, p).empty());
}

TEST(SubsetKey, Operations) {
    const auto s = SubsetKey::of({0, 2});
    EXPECT_EQ(s.size(), 2U);
    EXPECT_TRUE(s.contains(2));
    EXPECT_FALSE(s.contains(1));
    EXPECT_EQ(s.with(1), SubsetKey::of({0, 1, 2}));
    EXPECT_EQ(s.without(0), SubsetKey::of({2}));
    EXPECT_EQ(to_string(s), "{1,3}");
    EXPECT_EQ(to_string(SubsetKey()), "{}");
    EXPECT_EQ(s.members(), (std::vector<unsigned>{0, 2}));
    EXPECT_TRUE(s.intersects(SubsetKey::of({2, 3})));
    EXPECT_FALSE(s.intersects(SubsetKey::of({1, 3})));
    EXPECT_EQ(s - SubsetKey::of({0}), SubsetKey::of({2}));
}

TEST(SubsetKey, EnumerationCountsMatchBinomial) {
    for (unsigned n = 0; n <= 12; ++n) {
        for (unsigned k = 0; k <= n + 1; ++k) {
            std::set<std::uint64_t> seen;
            for_each_subset(n, k, [&](SubsetKey s) {
                EXPECT_EQ(s.size(), k);
                EXPECT_LT(s.bits(), std::uint64_t{1} << n);
                seen.insert(s.bits());
            });
            EXPECT_EQ(BigInt(seen.size()), binomial(n, k)) << n << " choose " << k;
        }
    }
}

TEST(Json, SystemParamsRoundTrip) {
    auto p = params(20, 4, Rational(12, 5), Rational(3, 2), 100);
    p.num_provisioned = 9;
    const nlohmann::json j = p;
    EXPECT_EQ(j["M"], "12/5");
    EXPECT_EQ(j["K_prime"], 9);
    EXPECT_EQ(j.get<SystemParams>(), p);

    const auto parsed = nlohmann::json::parse(R"({"N":2,"K":3,"M":1,"r":"1.5","F":8})").get<SystemParams>();
    EXPECT_EQ(parsed.num_provisioned, 3U);
    EXPECT_EQ(parsed.expansion, Rational(3, 2));
}

TEST(Json, RequestVectorIsOneBased) {
    const RequestVector d{{0, 1, 0}};
    const nlohmann::json j = d;
    EXPECT_EQ(j.dump(), "[1,2,1]");
    EXPECT_EQ(j.get<RequestVector>(), d);
    EXPECT_THROW(nlohmann::json::parse("[0,1]").get<RequestVector>(), InvalidParams);
}

TEST(Json, CacheContentsRoundTrip) {
    CacheContents c;
    c.set(0, 0, {1, 5, 9});
    c.set(0, 1, {});
    c.set(3, 1, {0, 2, 4, 100});
    const nlohmann::json j = c;
    EXPECT_EQ(j["format"], "delta-sorted-indices-v1");
    EXPECT_EQ(j.get<CacheContents>(), c);
    EXPECT_EQ(c.user_total(0), 3U);
    EXPECT_THROW((void)c.indices(1, 0), Error);
}

} // namespace
} // namespace mdscache
