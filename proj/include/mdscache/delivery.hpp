/**************************************************************************
 * delivery.hpp
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
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cache_model.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "placement.hpp"
#include "rational.hpp"

namespace mdscache {

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

/// Largest K for which the delivery enumerates all 2^K subsets.
inline constexpr unsigned kMaxDeliveryUsers = 20;

/// U: the lowest-indexed active user for each distinct requested file.
inline SubsetKey leaders(const RequestVector& d) {
    SubsetKey u;
    std::vector<std::uint32_t> seen;
    for (unsigned k = 0; k < d.size(); ++k) {
        if (std::find(seen.begin(), seen.end(), d[k]) == seen.end()) {
            seen.push_back(d[k]);
            u = u.with(k);
        }
    }
    return u;
}

enum class MessageKind { coded, fallback, top_up };

inline const char* to_string(MessageKind kind) {
    switch (kind) {
    case MessageKind::coded: return "coded";
    case MessageKind::fallback: return "fallback";
    case MessageKind::top_up: return "top_up";
    }
    return "?";
}

/// One XOR term: the first `used` symbols of block (file, block) intended for `user`.
struct MessageComponent {
    unsigned user = 0;
    std::uint32_t file = 0;
    SubsetKey block;
    std::uint64_t block_size = 0;
    std::uint64_t used = 0;
};

struct BroadcastMessage {
    MessageKind kind = MessageKind::coded;
    unsigned level = 0;                       // |S|; 0 for top-up
    SubsetKey subset;
    std::uint64_t length = 0;
    std::vector<MessageComponent> components;
    std::vector<std::uint32_t> direct_indices; // top-up only: coded indices of components[0].file
    std::vector<Symbol> payload;
};

/// State of the accumulator loop at one level j, in symbols.
struct IterationRecord {
    unsigned level = 0;
    Rational seg;
    Rational acc;
    Rational acc_new;
    Rational incr;
    BigInt messages;                 // C(K,j) - C(K-N(d),j)
    bool last = false;
    std::uint64_t cap = kUnbounded;  // per-message truncation; ceil(incr) on the last level
    std::uint64_t sent_symbols = 0;
};

struct DeliverySchedule {
    std::uint64_t file_len = 0;
    unsigned num_active = 0;
    RequestVector demand;
    SubsetKey leader_set;
    std::vector<IterationRecord> iterations;
    std::optional<unsigned> stop_level;
    std::vector<BroadcastMessage> messages;
    Rational planned_total = 0;
    std::uint64_t coded_symbols = 0;
    std::uint64_t fallback_symbols = 0;
    std::uint64_t top_up_symbols = 0;
    std::vector<SubsetKey> fallback_subsets;

    std::uint64_t total_symbols() const { return coded_symbols + fallback_symbols + top_up_symbols; }
    Rational planned_rate() const { return planned_total / file_len; }
    Rational measured_rate() const { return Rational(total_symbols()) / file_len; }

    const IterationRecord* iteration(unsigned level) const {
        for (const auto& it : iterations) {
            if (it.level == level) return &it;
        }
        return nullptr;
    }
};

/// Representative block size for |A| = subset_size, in symbols.
using LevelSizes = std::function<Rational(unsigned subset_size)>;

inline LevelSizes expected_level_sizes(const SystemParams& params) {
    return [params](unsigned size) { return expected_block_size(params, size); };
}

/// Mean of |W'_{d_k, A}| over active k and A not containing k with |A| = size.
inline LevelSizes empirical_level_sizes(const std::map<std::uint32_t, SubfilePartition>& partitions,
                                        const RequestVector& d) {
    const unsigned k_count = static_cast<unsigned>(d.size());
    std::vector<BigInt> sums(k_count + 1, 0);
    for (unsigned k = 0; k < k_count; ++k) {
        const auto& part = partitions.at(d[k]);
        for (const auto& [subset, idx] : part.blocks) {
            if (!subset.contains(k)) sums[subset.size()] += idx.size();
        }
    }
    return [sums, k_count](unsigned size) {
        if (size >= k_count) return Rational(0);
        return Rational(sums[size]) / Rational(BigInt(k_count) * binomial(k_count - 1, size));
    };
}

struct PlanOptions {
    bool list_messages = true;
};

/// The accumulator loop over j = K..1 with message lengths only.
inline DeliverySchedule plan_schedule(const SystemParams& params, const RequestVector& d, const LevelSizes& sizes,
                                      PlanOptions options = {}) {
    require_valid(params);
    if (const auto v = validate(d, params); !v.empty()) throw InvalidParams(v.front().message);
    const unsigned k = params.num_active;
    const Rational f(params.file_len);

    DeliverySchedule out;
    out.file_len = params.file_len;
    out.num_active = k;
    out.demand = d;
    out.leader_set = leaders(d);
    const std::int64_t outside = static_cast<std::int64_t>(k) - distinct_requests(d);

    Rational acc = params.cache_size * f / params.num_files;
    if (acc >= f) return out;
    if (options.list_messages && k > kMaxDeliveryUsers) throw InvalidParams("too many active users to list messages");

    for (unsigned j = k; j >= 1; --j) {
        IterationRecord rec;
        rec.level = j;
        rec.seg = sizes(j - 1);
        const Rational peers(binomial(k - 1, j - 1));
        rec.acc = acc;
        rec.acc_new = acc + rec.seg * peers;
        rec.incr = std::min(rec.seg * peers, f - acc) / peers;
        rec.messages = binomial(k, j) - binomial(outside, j);
        rec.last = rec.acc_new >= f;
        if (rec.last) rec.cap = rational_ceil(rec.incr).convert_to<std::uint64_t>();
        out.planned_total += Rational(rec.messages) * rec.incr;

        if (options.list_messages && rec.incr > 0) {
            const auto len = rational_ceil(rec.incr).convert_to<std::uint64_t>();
            for_each_subset(k, j, [&](SubsetKey s) {
                if (!s.intersects(out.leader_set)) return;
                BroadcastMessage m;
                m.level = j;
                m.subset = s;
                m.length = len;
                out.messages.push_back(std::move(m));
                rec.sent_symbols += len;
            });
            out.coded_symbols += rec.sent_symbols;
        }
        out.iterations.push_back(rec);
        if (rec.last) {
            out.stop_level = j;
            return out;
        }
        acc = rec.acc_new;
    }
    throw ScheduleInfeasible("accumulated symbols never reach F; r must be at least 1");
}

/// Sent subsets T whose messages XOR to the message of `skipped`, which
/// must contain no leader: T = (skipped | U) \ V over every V != U that has
/// exactly one requester of each demanded file.
inline std::vector<SubsetKey> identity_partners(SubsetKey skipped, SubsetKey leader_set, const RequestVector& d) {
    const SubsetKey all = skipped | leader_set;
    std::map<std::uint32_t, std::vector<unsigned>> by_file;
    for (auto k : all.members()) by_file[d[k]].push_back(k);
    std::vector<std::vector<unsigned>> choices;
    for (auto& [file, users] : by_file) choices.push_back(users);

    std::vector<SubsetKey> out;
    std::vector<std::size_t> pick(choices.size(), 0);
    for (;;) {
        SubsetKey v;
        for (std::size_t i = 0; i < choices.size(); ++i) v = v.with(choices[i][pick[i]]);
        if (v != leader_set) out.push_back(all - v);
        std::size_t i = 0;
        while (i < choices.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
        if (i == choices.size()) break;
    }
    return out;
}

/// What a receiver can know about one level's messages: subset -> (sent
/// length, longest component). Unsent subsets are absent.
struct LevelView {
    std::map<SubsetKey, std::pair<std::uint64_t, std::uint64_t>> sent;

    /// Prefix of the zero-padded message of `t` known to every receiver.
    std::uint64_t known_prefix(SubsetKey t, std::uint64_t longest_component) const {
        if (longest_component == 0) return kUnbounded;
        auto it = sent.find(t);
        if (it == sent.end()) return 0;
        return it->second.first >= it->second.second ? kUnbounded : it->second.first;
    }
};

/// Prefix of a skipped message recoverable by XOR of its identity partners.
inline std::uint64_t reconstructible_prefix(SubsetKey skipped, SubsetKey leader_set, const RequestVector& d,
                                            const LevelView& view,
                                            const std::function<std::uint64_t(SubsetKey)>& longest_component) {
    std::uint64_t prefix = kUnbounded;
    for (auto t : identity_partners(skipped, leader_set, d)) {
        prefix = std::min(prefix, view.known_prefix(t, longest_component(t)));
    }
    return prefix;
}

struct DeliverOptions {
    /// Repair finite-F shortfalls with uncoded symbols.
    bool top_up = true;
};

/// Runs the delivery against actual (random) blocks and produces payloads.
/// `active[k]` is the provisioned id of active user k; `coded` maps each
/// requested file to its coded symbols.
inline DeliverySchedule deliver(const SystemParams& params, const CacheContents& cache,
                                std::span<const std::uint32_t> active, const RequestVector& d,
                                const std::map<std::uint32_t, std::vector<Symbol>>& coded,
                                DeliverOptions options = {}) {
    const unsigned k_count = params.num_active;
    if (k_count > kMaxDeliveryUsers) throw InvalidParams("delivery supports at most 20 active users");
    if (active.size() != k_count) throw InvalidParams("active user list must have K entries");

    DeliverySchedule out = plan_schedule(params, d, expected_level_sizes(params), {.list_messages = false});
    out.coded_symbols = 0;
    const SubsetKey u = out.leader_set;

    std::map<std::uint32_t, SubfilePartition> parts;
    for (auto file : d.files) {
        if (!parts.contains(file)) parts.emplace(file, partition_subfiles(cache, active, file, params));
        if (!coded.contains(file) || coded.at(file).size() != params.coded_len()) {
            throw InvalidParams("missing or mis-sized coded file " + std::to_string(file + 1));
        }
    }
    auto block_size = [&](unsigned user, SubsetKey s) { return parts.at(d[user]).block_size(s.without(user)); };
    auto longest = [&](SubsetKey s) {
        std::uint64_t m = 0;
        for (auto x : s.members()) m = std::max(m, block_size(x, s));
        return m;
    };
    auto make_message = [&](MessageKind kind, unsigned level, SubsetKey s, std::uint64_t len) {
        BroadcastMessage m;
        m.kind = kind;
        m.level = level;
        m.subset = s;
        m.length = len;
        m.payload.assign(len, 0);
        for (auto x : s.members()) {
            const auto& blk = parts.at(d[x]).block(s.without(x));
            const auto& cw = coded.at(d[x]);
            const std::uint64_t used = std::min<std::uint64_t>(len, blk.size());
            for (std::uint64_t i = 0; i < used; ++i) m.payload[i] ^= cw[blk[i]];
            m.components.push_back({x, d[x], s.without(x), blk.size(), used});
        }
        return m;
    };

    // Known coded indices of the requested file, per active user.
    std::vector<std::vector<bool>> known(k_count, std::vector<bool>(params.coded_len(), false));
    std::vector<std::uint64_t> known_count(k_count, 0);
    auto learn = [&](unsigned user, std::uint32_t index) {
        if (!known[user][index]) {
            known[user][index] = true;
            ++known_count[user];
        }
    };
    for (unsigned k = 0; k < k_count; ++k) {
        for (auto idx : cache.indices(active[k], d[k])) learn(k, idx);
    }
    auto learn_prefix = [&](unsigned user, SubsetKey s, std::uint64_t prefix) {
        const auto& blk = parts.at(d[user]).block(s.without(user));
        const auto n = std::min<std::uint64_t>(prefix, blk.size());
        for (std::uint64_t i = 0; i < n; ++i) learn(user, blk[i]);
    };

    for (auto& rec : out.iterations) {
        LevelView view;
        std::vector<std::pair<SubsetKey, std::uint64_t>> skipped;
        for_each_subset(k_count, rec.level, [&](SubsetKey s) {
            const auto len = std::min(longest(s), rec.cap);
            if (len == 0) return;
            if (!s.intersects(u)) {
                skipped.emplace_back(s, len);
                return;
            }
            out.messages.push_back(make_message(MessageKind::coded, rec.level, s, len));
            view.sent[s] = {len, longest(s)};
            rec.sent_symbols += len;
            out.coded_symbols += len;
            for (auto x : s.members()) learn_prefix(x, s, len);
        });
        for (const auto& [s, len] : skipped) {
            const auto prefix = reconstructible_prefix(s, u, d, view, longest);
            if (prefix >= len) {
                for (auto x : s.members()) learn_prefix(x, s, prefix);
                continue;
            }
            out.messages.push_back(make_message(MessageKind::fallback, rec.level, s, len));
            out.fallback_subsets.push_back(s);
            rec.sent_symbols += len;
            out.fallback_symbols += len;
            for (auto x : s.members()) learn_prefix(x, s, len);
        }
    }

    if (!options.top_up) return out;
    for (unsigned k = 0; k < k_count; ++k) {
        // Earlier top-ups of the same file are overheard.
        for (const auto& m : out.messages) {
            if (m.kind != MessageKind::top_up || m.components.front().file != d[k]) continue;
            for (auto idx : m.direct_indices) learn(k, idx);
        }
        if (known_count[k] >= params.file_len) continue;
        BroadcastMessage m;
        m.kind = MessageKind::top_up;
        m.subset = SubsetKey{}.with(k);
        const auto& cw = coded.at(d[k]);
        for (std::uint32_t idx = 0; known_count[k] < params.file_len; ++idx) {
            if (known[k][idx]) continue;
            m.direct_indices.push_back(idx);
            m.payload.push_back(cw[idx]);
            learn(k, idx);
        }
        m.length = m.direct_indices.size();
        m.components.push_back({k, d[k], SubsetKey{}, 0, m.length});
        out.top_up_symbols += m.length;
        out.messages.push_back(std::move(m));
    }
    return out;
}

// ---- Serialization --------------------------------------------------------

inline void to_json(nlohmann::json& j, const IterationRecord& r) {
    j = nlohmann::json{{"j", r.level},
                       {"seg", to_string(r.seg)},
                       {"acc", to_string(r.acc)},
                       {"acc_new", to_string(r.acc_new)},
                       {"incr", to_string(r.incr)},
                       {"messages", r.messages.str()},
                       {"last", r.last},
                       {"cap", r.cap == kUnbounded ? nlohmann::json(nullptr) : nlohmann::json(r.cap)},
                       {"sent_symbols", r.sent_symbols}};
}

inline nlohmann::json subset_json(SubsetKey s) {
    auto arr = nlohmann::json::array();
    for (auto k : s.members()) arr.push_back(k + 1);
    return arr;
}

inline void to_json(nlohmann::json& j, const BroadcastMessage& m) {
    j = nlohmann::json{{"kind", to_string(m.kind)}, {"j", m.level}, {"subset", subset_json(m.subset)},
                       {"length", m.length}};
    auto comps = nlohmann::json::array();
    for (const auto& c : m.components) {
        comps.push_back({{"user", c.user + 1}, {"file", c.file + 1}, {"block", subset_json(c.block)},
                         {"block_size", c.block_size}, {"offsets", {0, c.used}}});
    }
    j["components"] = comps;
    if (!m.direct_indices.empty()) j["indices"] = m.direct_indices;
}

/// Lengths, subsets and iteration records; payloads go to the sidecar.
inline void to_json(nlohmann::json& j, const DeliverySchedule& s) {
    j = nlohmann::json{{"F", s.file_len},
                       {"K", s.num_active},
                       {"demand", s.demand},
                       {"leaders", subset_json(s.leader_set)},
                       {"stop_level", s.stop_level ? nlohmann::json(*s.stop_level) : nlohmann::json(nullptr)},
                       {"iterations", s.iterations},
                       {"messages", s.messages},
                       {"planned_total", to_string(s.planned_total)},
                       {"coded_symbols", s.coded_symbols},
                       {"fallback_symbols", s.fallback_symbols},
                       {"top_up_symbols", s.top_up_symbols}};
}

/// Sidecar layout, little endian: "MDSP", u32 version (1), u64 message
/// count, then per message u64 length followed by length u16 symbols.
inline void write_payload_sidecar(std::ostream& os, const DeliverySchedule& s) {
    auto put = [&](std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    };
    os.write("MDSP", 4);
    put(1, 4);
    put(s.messages.size(), 8);
    for (const auto& m : s.messages) {
        put(m.payload.size(), 8);
        for (auto sym : m.payload) put(sym, 2);
    }
}

inline std::vector<std::vector<Symbol>> read_payload_sidecar(std::istream& is) {
    auto get = [&](int bytes) {
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            const int c = is.get();
            if (c == std::char_traits<char>::eof()) throw Error("truncated payload sidecar");
            v |= std::uint64_t(static_cast<unsigned char>(c)) << (8 * i);
        }
        return v;
    };
    char magic[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != "MDSP") throw Error("not a payload sidecar");
    if (get(4) != 1) throw Error("unsupported sidecar version");
    std::vector<std::vector<Symbol>> out(get(8));
    for (auto& p : out) {
        p.resize(get(8));
        for (auto& sym : p) sym = static_cast<Symbol>(get(2));
    }
    return out;
}

} // namespace mdscache
