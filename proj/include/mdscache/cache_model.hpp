/**************************************************************************
 * cache_model.hpp
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

#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "field.hpp"
#include "rational.hpp"

namespace mdscache {

/// (N, K', K, M, r, F) plus the symbol field width.
struct SystemParams {
    std::uint32_t num_files = 0;          // N
    std::uint32_t num_provisioned = 0;    // K'
    std::uint32_t num_active = 0;         // K
    Rational cache_size = 0;              // M, in file units
    Rational expansion = 1;               // r, coded length / file length
    std::uint64_t file_len = 0;           // F, symbols per file
    unsigned field_width = 16;

    /// q = M / (rN), the probability a given coded symbol sits in a given cache.
    Rational cache_probability() const { return cache_size / (expansion * num_files); }

    /// M F / N; only meaningful for feasible params.
    std::uint64_t cached_per_file() const {
        return rational_floor(cache_size * file_len / num_files).convert_to<std::uint64_t>();
    }

    /// r F; only meaningful for feasible params.
    std::uint64_t coded_len() const { return rational_floor(expansion * file_len).convert_to<std::uint64_t>(); }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct Violation {
    std::string field;
    std::string message;
};

/// Smallest F' >= F such that M F'/N and r F' are integers.
inline std::uint64_t smallest_feasible_file_len(const Rational& cache_size, std::uint32_t num_files,
                                                const Rational& expansion, std::uint64_t at_least) {
    const BigInt step = lcm(denominator(cache_size / num_files), denominator(expansion));
    BigInt f = (BigInt(std::max<std::uint64_t>(at_least, 1)) + step - 1) / step * step;
    return f.convert_to<std::uint64_t>();
}

namespace detail {

inline std::vector<Violation> validate_rate_inputs(std::uint32_t n, std::uint32_t k, const Rational& m,
                                                   const Rational& r) {
    std::vector<Violation> out;
    if (n < 1) out.push_back({"N", "N >= 1 (got N = 0)"});
    if (k < 1) out.push_back({"K", "K >= 1 (got K = 0)"});
    if (m < 0) out.push_back({"M", "M >= 0 (got M = " + to_string(m) + ")"});
    if (m > n) out.push_back({"M", "M <= N (got M = " + to_string(m) + ", N = " + std::to_string(n) + ")"});
    if (r < 1) out.push_back({"r", "r >= 1 (got r = " + to_string(r) + ")"});
    if (n >= 1 && r < m / n) {
        out.push_back({"r", "r >= M/N so that q = M/(rN) <= 1 (got r = " + to_string(r) + ")"});
    }
    return out;
}

} // namespace detail

/// Every violated invariant of `params`; empty means valid.
inline std::vector<Violation> validate(const SystemParams& p) {
    auto out = detail::validate_rate_inputs(p.num_files, p.num_active, p.cache_size, p.expansion);
    if (p.num_active > p.num_provisioned) {
        out.push_back({"K", "K <= K' (got K = " + std::to_string(p.num_active) +
                                ", K' = " + std::to_string(p.num_provisioned) + ")"});
    }
    if (p.field_width != 8 && p.field_width != 16) {
        out.push_back({"field_width", "field width must be 8 or 16"});
    }
    if (p.file_len < 1) {
        out.push_back({"F", "F >= 1 (got F = 0)"});
    } else if (p.num_files >= 1) {
        const std::string hint = " (smallest feasible F' >= F is " +
            std::to_string(smallest_feasible_file_len(p.cache_size, p.num_files, p.expansion, p.file_len)) + ")";
        if (!is_integer(p.cache_size * p.file_len / p.num_files)) {
            out.push_back({"F", "MF/N is an integer (got MF/N = " +
                                    to_string(p.cache_size * p.file_len / p.num_files) + ")" + hint});
        }
        if (!is_integer(p.expansion * p.file_len)) {
            out.push_back({"F", "rF is an integer (got rF = " + to_string(p.expansion * p.file_len) + ")" + hint});
        }
    }
    return out;
}

inline void require_valid(const SystemParams& p) {
    const auto violations = validate(p);
    if (violations.empty()) return;
    std::string msg = "invalid parameters:";
    for (const auto& v : violations) msg += "\n  " + v.message;
    throw InvalidParams(msg);
}

/// Demands of the active users; entry k is the file (0-based) user k wants.
struct RequestVector {
    std::vector<std::uint32_t> files;

    std::size_t size() const { return files.size(); }
    std::uint32_t operator[](std::size_t k) const { return files[k]; }

    friend bool operator==(const RequestVector&, const RequestVector&) = default;
};

/// N(d): number of distinct requested files.
inline std::uint32_t distinct_requests(const RequestVector& d) {
    return static_cast<std::uint32_t>(std::set<std::uint32_t>(d.files.begin(), d.files.end()).size());
}

inline std::vector<Violation> validate(const RequestVector& d, const SystemParams& p) {
    std::vector<Violation> out;
    if (d.size() != p.num_active) {
        out.push_back({"d", "request vector length " + std::to_string(d.size()) + " != K = " +
                                std::to_string(p.num_active)});
    }
    for (auto f : d.files) {
        if (f >= p.num_files) {
            out.push_back({"d", "requested file " + std::to_string(f + 1) + " outside [1, N]"});
            break;
        }
    }
    return out;
}

/// Round robin over min(N, K) distinct files: (0, 1, .., J-1, 0, 1, ..).
inline RequestVector worst_case_demand(std::uint32_t num_files, std::uint32_t num_active) {
    RequestVector d;
    const auto distinct = std::min(num_files, num_active);
    for (std::uint32_t k = 0; k < num_active; ++k) d.files.push_back(k % distinct);
    return d;
}

/// A subset of active users (positions 0..K-1), as a bitmask.
class SubsetKey {
public:
    constexpr SubsetKey() = default;
    constexpr explicit SubsetKey(std::uint64_t bits) : bits_(bits) {}

    static SubsetKey of(std::initializer_list<unsigned> users) {
        std::uint64_t b = 0;
        for (auto u : users) b |= std::uint64_t{1} << u;
        return SubsetKey(b);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr unsigned size() const { return static_cast<unsigned>(std::popcount(bits_)); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(unsigned k) const { return (bits_ >> k) & 1U; }
    constexpr SubsetKey with(unsigned k) const { return SubsetKey(bits_ | (std::uint64_t{1} << k)); }
    constexpr SubsetKey without(unsigned k) const { return SubsetKey(bits_ & ~(std::uint64_t{1} << k)); }
    constexpr bool intersects(SubsetKey o) const { return (bits_ & o.bits_) != 0; }
    constexpr SubsetKey operator|(SubsetKey o) const { return SubsetKey(bits_ | o.bits_); }
    constexpr SubsetKey operator&(SubsetKey o) const { return SubsetKey(bits_ & o.bits_); }
    constexpr SubsetKey operator-(SubsetKey o) const { return SubsetKey(bits_ & ~o.bits_); }

    std::vector<unsigned> members() const {
        std::vector<unsigned> out;
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<unsigned>(std::countr_zero(b)));
        return out;
    }

    friend constexpr auto operator<=>(SubsetKey, SubsetKey) = default;

private:
    std::uint64_t bits_ = 0;
};

/// "{1,3}" with 1-based user labels, "{}" for the empty set.
inline std::string to_string(SubsetKey s) {
    std::string out = "{";
    bool first = true;
    for (auto k : s.members()) {
        if (!first) out += ",";
        out += std::to_string(k + 1);
        first = false;
    }
    return out + "}";
}

/// Calls fn(SubsetKey) for every subset of {0..n-1} of the given size,
/// in increasing bitmask order.
template <typename Fn>
void for_each_subset(unsigned n, unsigned size, Fn&& fn) {
    if (size > n) return;
    if (size == 0) {
        fn(SubsetKey{});
        return;
    }
    // Gosper's hack.
    std::uint64_t s = (std::uint64_t{1} << size) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (s < limit) {
        fn(SubsetKey(s));
        const std::uint64_t c = s & (~s + 1);
        const std::uint64_t r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

/// Placement output: for each (provisioned user, file) the sorted coded
/// indices in that user's cache. Pairs not sampled are simply absent.
class CacheContents {
public:
    using Key = std::pair<std::uint32_t, std::uint32_t>;

    void set(std::uint32_t user, std::uint32_t file, std::vector<std::uint32_t> indices) {
        entries_[{user, file}] = std::move(indices);
    }

    bool has(std::uint32_t user, std::uint32_t file) const { return entries_.contains({user, file}); }

    const std::vector<std::uint32_t>& indices(std::uint32_t user, std::uint32_t file) const {
        auto it = entries_.find({user, file});
        if (it == entries_.end()) {
            throw Error("no cache entry for user " + std::to_string(user) + ", file " + std::to_string(file));
        }
        return it->second;
    }

    const std::map<Key, std::vector<std::uint32_t>>& entries() const { return entries_; }

    /// Symbols held by one user across all sampled files.
    std::uint64_t user_total(std::uint32_t user) const {
        std::uint64_t total = 0;
        for (const auto& [key, idx] : entries_) {
            if (key.first == user) total += idx.size();
        }
        return total;
    }

    friend bool operator==(const CacheContents&, const CacheContents&) = default;

private:
    std::map<Key, std::vector<std::uint32_t>> entries_;
};

/// W'_{n,S} for one file: the coded indices cached by exactly the active
/// subset S. Blocks are disjoint and cover [0, rF).
struct SubfilePartition {
    std::uint32_t file = 0;
    std::uint64_t coded_len = 0;
    std::map<SubsetKey, std::vector<std::uint32_t>> blocks;

    const std::vector<std::uint32_t>& block(SubsetKey s) const {
        static const std::vector<std::uint32_t> empty;
        auto it = blocks.find(s);
        return it == blocks.end() ? empty : it->second;
    }

    std::uint64_t block_size(SubsetKey s) const { return block(s).size(); }
};

// JSON. File indices in request vectors are 1-based on the wire.

inline void to_json(nlohmann::json& j, const SystemParams& p) {
    j = nlohmann::json{{"N", p.num_files},         {"K_prime", p.num_provisioned},
                       {"K", p.num_active},        {"M", to_string(p.cache_size)},
                       {"r", to_string(p.expansion)}, {"F", p.file_len},
                       {"field_width", p.field_width}};
}

namespace detail {
inline Rational rational_from_json(const nlohmann::json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) return parse_rational(v.dump());
    throw InvalidParams("expected a rational, got " + v.dump());
}
} // namespace detail

inline void from_json(const nlohmann::json& j, SystemParams& p) {
    p.num_files = j.at("N").get<std::uint32_t>();
    p.num_active = j.at("K").get<std::uint32_t>();
    p.num_provisioned = j.value("K_prime", p.num_active);
    p.cache_size = detail::rational_from_json(j.at("M"));
    p.expansion = j.contains("r") ? detail::rational_from_json(j.at("r")) : Rational(1);
    p.file_len = j.value("F", std::uint64_t{0});
    p.field_width = j.value("field_width", 16U);
}

inline void to_json(nlohmann::json& j, const RequestVector& d) {
    j = nlohmann::json::array();
    for (auto f : d.files) j.push_back(f + 1);
}

inline void from_json(const nlohmann::json& j, RequestVector& d) {
    d.files.clear();
    for (const auto& v : j) {
        const auto f = v.get<std::int64_t>();
        if (f < 1) throw InvalidParams("request vector entries are 1-based file indices");
        d.files.push_back(static_cast<std::uint32_t>(f - 1));
    }
}

/// {"entries": [{"user": u, "file": n, "deltas": [i0, i1-i0, ...]}, ...]}
inline void to_json(nlohmann::json& j, const CacheContents& c) {
    auto entries = nlohmann::json::array();
    for (const auto& [key, idx] : c.entries()) {
        std::vector<std::uint32_t> deltas;
        deltas.reserve(idx.size());
        std::uint32_t prev = 0;
        for (auto i : idx) {
            deltas.push_back(i - prev);
            prev = i;
        }
        entries.push_back({{"user", key.first}, {"file", key.second}, {"deltas", deltas}});
    }
    j = nlohmann::json{{"format", "delta-sorted-indices-v1"}, {"entries", entries}};
}

inline void from_json(const nlohmann::json& j, CacheContents& c) {
    c = CacheContents{};
    for (const auto& e : j.at("entries")) {
        std::vector<std::uint32_t> idx;
        std::uint32_t acc = 0;
        for (const auto& d : e.at("deltas")) {
            acc += d.get<std::uint32_t>();
            idx.push_back(acc);
        }
        c.set(e.at("user").get<std::uint32_t>(), e.at("file").get<std::uint32_t>(), std::move(idx));
    }
}

} // namespace mdscache
