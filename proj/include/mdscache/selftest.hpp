/**************************************************************************
 * selftest.hpp
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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "delivery.hpp"
#include "field.hpp"
#include "mds.hpp"
#include "placement.hpp"
#include "verify.hpp"

namespace mdscache {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Field axioms on random triples; returns a description of the first
/// failure, or an empty string.
inline std::string check_field_axioms(const GaloisField& gf, std::uint64_t seed, int trials = 2000) {
    std::mt19937_64 rng(seed);
    auto draw = [&] { return static_cast<Symbol>(uniform_below(rng, gf.order())); };
    for (int t = 0; t < trials; ++t) {
        const Symbol a = draw(), b = draw(), c = draw();
        if (gf.mul(a, 1) != a) return "identity fails at " + std::to_string(a);
        if (gf.mul(a, b) != gf.mul(b, a)) return "commutativity fails";
        if (gf.mul(gf.mul(a, b), c) != gf.mul(a, gf.mul(b, c))) return "associativity fails";
        if (gf.mul(a, b ^ c) != (gf.mul(a, b) ^ gf.mul(a, c))) return "distributivity fails";
        if (a != 0 && gf.mul(a, gf.inv(a)) != 1) return "inverse fails at " + std::to_string(a);
    }
    // Every nonzero element is a power of alpha exactly once.
    std::vector<bool> seen(gf.order(), false);
    for (std::size_t i = 0; i < gf.group_order(); ++i) {
        const Symbol x = gf.exp(i);
        if (x == 0 || seen[x]) return "antilog table is not a permutation of the nonzero elements";
        seen[x] = true;
    }
    return {};
}

struct SelftestOptions {
    /// Negative control: run the field checks against a damaged table.
    bool corrupt_field = false;
    std::uint64_t seed = 1;
};

inline std::vector<CheckResult> run_selftest(const SelftestOptions& opt = {}) {
    std::vector<CheckResult> out;
    auto expect_rate = [&](const std::string& name, const Rational& got, const Rational& want) {
        out.push_back({name, got == want, "got " + to_string(got) + ", want " + to_string(want)});
    };

    expect_rate("uncoded decentralized (N=2,M=1,K=2) = 3/4", rate_uncoded_dec(2, 1, 2), Rational(3, 4));
    expect_rate("uncoded centralized (N=2,M=1,K=2) = 1/2", rate_uncoded_cen(2, 1, 2), Rational(1, 2));
    expect_rate("mds (N=2,M=1,K=2,r=2) = 5/8", rate_mds_dec(2, 1, 2, 2), Rational(5, 8));
    expect_rate("mds (N=2,M=1,K=2,r=3) = 7/12", rate_mds_dec(2, 1, 2, 3), Rational(7, 12));
    expect_rate("mds (N=2,M=1,K=2,r=4) = 9/16", rate_mds_dec(2, 1, 2, 4), Rational(9, 16));
    expect_rate("mds (N=2,M=1,K=3,r=2) = 45/64", rate_mds_dec(2, 1, 3, 2), Rational(45, 64));
    expect_rate("mds (N=2,M=1,K=3,r=3/2) = 25/36", rate_mds_dec(2, 1, 3, Rational(3, 2)), Rational(25, 36));
    {
        bool ok = true;
        std::string detail = "r = 1..100";
        for (int r = 1; r <= 100 && ok; ++r) {
            if (rate_mds_dec(2, 1, 2, r) != Rational(1, 2) + Rational(1, 4 * r)) {
                ok = false;
                detail = "mismatch at r = " + std::to_string(r);
            }
        }
        out.push_back({"mds (N=2,M=1,K=2,r) = 1/2 + 1/(4r)", ok, detail});
    }

    {
        GaloisField gf = GaloisField::gf16();
        if (opt.corrupt_field) gf.corrupt_antilog_entry(12345, 0x0001);
        const auto fail16 = check_field_axioms(gf, opt.seed);
        out.push_back({"GF(2^16) axioms", fail16.empty(), fail16.empty() ? "2000 random triples" : fail16});
        GaloisField gf8 = GaloisField::gf8();
        if (opt.corrupt_field) gf8.corrupt_antilog_entry(77, 0x0001);
        const auto fail8 = check_field_axioms(gf8, opt.seed + 1);
        out.push_back({"GF(2^8) axioms", fail8.empty(), fail8.empty() ? "2000 random triples" : fail8});
    }

    {
        const CodecConfig cfg{4, 8, 16, kPrimitivePoly16};
        const ReedSolomonCodec codec(cfg);
        std::mt19937_64 rng(opt.seed);
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            std::vector<Symbol> msg(4);
            for (auto& s : msg) s = static_cast<Symbol>(rng());
            const auto cw = codec.encode(msg);
            for_each_subset(8, 4, [&](SubsetKey s) {
                std::vector<CodedPoint> pts;
                for (auto i : s.members()) pts.push_back({i, cw[i]});
                if (codec.decode(pts) != msg) ok = false;
            });
        }
        out.push_back({"MDS any 4 of 8 reconstructs", ok, "20 messages x 70 index sets"});
    }

    {
        bool ok = true;
        std::string detail = "N in {2,5,20}, K in {2,3,4,8}, M in {N/10, N/4, N/2}";
        for (std::uint32_t n : {2U, 5U, 20U}) {
            for (std::uint32_t k : {2U, 3U, 4U, 8U}) {
                for (int div : {10, 4, 2}) {
                    const Rational m(n, div);
                    if (rate_mds_dec(n, m, k, 1) != rate_uncoded_dec(n, m, k)) {
                        ok = false;
                        detail = "mismatch at N=" + std::to_string(n) + " K=" + std::to_string(k) + " M=" + to_string(m);
                    }
                }
            }
        }
        out.push_back({"r = 1 equals uncoded decentralized", ok, detail});
    }

    {
        bool ok = true;
        std::string detail = "40 random tuples";
        std::mt19937_64 rng(opt.seed + 7);
        for (int t = 0; t < 40 && ok; ++t) {
            SystemParams p;
            p.num_files = 1 + static_cast<std::uint32_t>(uniform_below(rng, 6));
            p.num_active = 1 + static_cast<std::uint32_t>(uniform_below(rng, 6));
            p.num_provisioned = p.num_active;
            p.cache_size = Rational(uniform_below(rng, 4 * p.num_files + 1), 4);
            p.expansion = std::max(Rational(1), p.cache_size / p.num_files) + Rational(uniform_below(rng, 13), 4);
            p.file_len = smallest_feasible_file_len(p.cache_size, p.num_files, p.expansion, 16);
            const auto d = worst_case_demand(p.num_files, p.num_active);
            const auto plan = plan_schedule(p, d, expected_level_sizes(p));
            if (plan.planned_rate() != rate_mds_dec(p.num_files, p.cache_size, p.num_active, p.expansion)) {
                ok = false;
                detail = "mismatch at " + nlohmann::json(p).dump();
            }
        }
        out.push_back({"planned schedule matches closed-form rate", ok, detail});
    }

    {
        SystemParams p{2, 2, 2, 1, 2, 16, 16};
        TrialOptions topt;
        topt.trials = 5;
        topt.seed = opt.seed;
        topt.mode = VerifyMode::both;
        const auto st = run_trials(p, std::nullopt, topt);
        const bool ok = st.success_fraction == 1 && st.mode_disagreements == 0;
        out.push_back({"simulation decodes; accounting agrees with rank analysis", ok,
                       "5 trials at F = 16, success " + std::to_string(st.success_fraction)});
    }
    return out;
}

} // namespace mdscache
