/**************************************************************************
 * verify.hpp
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
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "cache_model.hpp"
#include "delivery.hpp"
#include "field.hpp"
#include "mds.hpp"
#include "placement.hpp"

namespace mdscache {

/// Files above this length are not run through the Reed-Solomon codec in
/// simulations (O(F^2) decoding); their coded symbols are drawn at random
/// and decodability follows from holding F distinct coded symbols.
inline constexpr std::uint64_t kMaxMaterializedFileLen = 4096;

/// Server-side content for one trial: coded symbols of the requested files
/// and, when the codec is materialized, the original messages.
struct Library {
    std::optional<CodecConfig> codec;
    std::map<std::uint32_t, std::vector<Symbol>> messages;
    std::map<std::uint32_t, std::vector<Symbol>> coded;

    bool materialized() const { return codec.has_value(); }
};

inline bool codec_fits(const SystemParams& params) {
    return params.file_len <= kMaxMaterializedFileLen &&
           params.coded_len() <= GaloisField::get(params.field_width).group_order();
}

template <typename Engine>
Library make_library(const SystemParams& params, std::span<const std::uint32_t> files, Engine& engine,
                     bool materialize) {
    Library lib;
    const auto& field = GaloisField::get(params.field_width);
    auto draw = [&] { return static_cast<Symbol>(uniform_below(engine, field.order())); };
    if (materialize) {
        lib.codec = CodecConfig{params.file_len, params.coded_len(), params.field_width,
                                default_primitive_poly(params.field_width)};
        ReedSolomonCodec codec(*lib.codec);
        for (auto f : files) {
            std::vector<Symbol> msg(params.file_len);
            for (auto& s : msg) s = draw();
            lib.coded[f] = codec.encode(msg);
            lib.messages[f] = std::move(msg);
        }
    } else {
        for (auto f : files) {
            std::vector<Symbol> cw(params.coded_len());
            for (auto& s : cw) s = draw();
            lib.coded[f] = std::move(cw);
        }
    }
    return lib;
}

/// Coded symbols one user can produce, per file; grows monotonically.
class KnowledgeSet {
public:
    void add_file(std::uint32_t file, std::uint64_t coded_len) {
        values_.try_emplace(file, std::vector<std::int32_t>(coded_len, -1));
    }

    bool knows(std::uint32_t file, std::uint32_t index) const {
        auto it = values_.find(file);
        return it != values_.end() && it->second[index] >= 0;
    }

    Symbol value(std::uint32_t file, std::uint32_t index) const {
        return static_cast<Symbol>(values_.at(file)[index]);
    }

    bool learn(std::uint32_t file, std::uint32_t index, Symbol v) {
        auto& slot = values_.at(file)[index];
        if (slot >= 0) return false;
        slot = v;
        ++counts_[file];
        return true;
    }

    std::uint64_t count(std::uint32_t file) const {
        auto it = counts_.find(file);
        return it == counts_.end() ? 0 : it->second;
    }

    std::vector<CodedPoint> points(std::uint32_t file) const {
        std::vector<CodedPoint> out;
        const auto& v = values_.at(file);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] >= 0) out.push_back({i, static_cast<Symbol>(v[i])});
        }
        return out;
    }

private:
    std::map<std::uint32_t, std::vector<std::int32_t>> values_;
    std::map<std::uint32_t, std::uint64_t> counts_;
};

enum class DecodeMode { accounting, exact };

struct DecodeOutcome {
    bool success = false;
    std::uint64_t known_symbols = 0;  // distinct coded symbols of the requested file (accounting)
    std::uint64_t deficit = 0;
    bool bit_exact = false;           // decoded content compared against the source
    std::string failure;
};

namespace detail {

struct ReceiverView {
    std::map<std::uint32_t, SubfilePartition> parts;
    std::map<std::pair<unsigned, SubsetKey>, const BroadcastMessage*> sent;  // coded and fallback
};

inline ReceiverView receiver_view(const SystemParams& params, const CacheContents& cache,
                                  std::span<const std::uint32_t> active, const DeliverySchedule& schedule) {
    ReceiverView v;
    for (auto f : schedule.demand.files) {
        if (!v.parts.contains(f)) v.parts.emplace(f, partition_subfiles(cache, active, f, params));
    }
    for (const auto& m : schedule.messages) {
        if (m.kind != MessageKind::top_up) v.sent[{m.level, m.subset}] = &m;
    }
    return v;
}

inline DecodeOutcome decode_accounting(unsigned k, const SystemParams& params, const CacheContents& cache,
                                       std::span<const std::uint32_t> active, const DeliverySchedule& schedule,
                                       const Library& lib) {
    const auto& d = schedule.demand;
    const auto want = d[k];
    const auto view = receiver_view(params, cache, active, schedule);
    auto block = [&](unsigned x, SubsetKey s) -> const std::vector<std::uint32_t>& {
        return view.parts.at(d[x]).block(s.without(x));
    };

    KnowledgeSet ks;
    for (const auto& [f, part] : view.parts) {
        ks.add_file(f, params.coded_len());
        for (auto idx : cache.indices(active[k], f)) ks.learn(f, idx, lib.coded.at(f)[idx]);
    }

    // Strips the other components of the message of S at position i;
    // `term(x, i)` is x's component of the (possibly reconstructed) message.
    auto strip = [&](SubsetKey s, std::uint64_t i, Symbol v, std::uint64_t limit_other) -> std::optional<Symbol> {
        for (auto x : s.members()) {
            if (x == k) continue;
            const auto& b = block(x, s);
            if (i >= std::min<std::uint64_t>(b.size(), limit_other)) continue;
            if (!ks.knows(d[x], b[i])) return std::nullopt;
            v ^= ks.value(d[x], b[i]);
        }
        return v;
    };

    std::string first_stuck;
    for (bool progress = true; progress;) {
        progress = false;
        for (const auto& m : schedule.messages) {
            if (m.kind == MessageKind::top_up) {
                if (m.components.front().file != want) continue;
                for (std::size_t i = 0; i < m.direct_indices.size(); ++i) {
                    progress |= ks.learn(want, m.direct_indices[i], m.payload[i]);
                }
                continue;
            }
            if (!m.subset.contains(k)) continue;
            const auto& own = block(k, m.subset);
            const auto n = std::min<std::uint64_t>(m.length, own.size());
            for (std::uint64_t i = 0; i < n; ++i) {
                if (ks.knows(want, own[i])) continue;
                if (auto v = strip(m.subset, i, m.payload[i], m.length)) {
                    progress |= ks.learn(want, own[i], *v);
                } else if (first_stuck.empty()) {
                    first_stuck = "message " + to_string(m.subset) + " has an unknown component";
                }
            }
        }
    }

    // Skipped messages (no leader inside) rebuilt from sent ones.
    for (const auto& rec : schedule.iterations) {
        for_each_subset(schedule.num_active, rec.level, [&](SubsetKey s) {
            if (!s.contains(k) || s.intersects(schedule.leader_set)) return;
            if (view.sent.contains({rec.level, s})) return;
            std::uint64_t prefix = kUnbounded;
            std::vector<const BroadcastMessage*> partners;
            for (auto t : identity_partners(s, schedule.leader_set, d)) {
                std::uint64_t longest = 0;
                for (auto x : t.members()) longest = std::max<std::uint64_t>(longest, block(x, t).size());
                if (longest == 0) continue;
                auto it = view.sent.find({rec.level, t});
                if (it == view.sent.end()) {
                    prefix = 0;
                    break;
                }
                partners.push_back(it->second);
                if (it->second->length < longest) prefix = std::min(prefix, it->second->length);
            }
            const auto& own = block(k, s);
            const auto n = std::min<std::uint64_t>(prefix, own.size());
            for (std::uint64_t i = 0; i < n; ++i) {
                Symbol v = 0;
                for (const auto* p : partners) {
                    if (i < p->length) v ^= p->payload[i];
                }
                if (auto sym = strip(s, i, v, kUnbounded)) {
                    ks.learn(want, own[i], *sym);
                } else if (first_stuck.empty()) {
                    first_stuck = "skipped message " + to_string(s) + " has an unknown component";
                }
            }
        });
    }

    DecodeOutcome out;
    out.known_symbols = ks.count(want);
    if (out.known_symbols < params.file_len) {
        out.deficit = params.file_len - out.known_symbols;
        const auto& part = view.parts.at(want);
        for (const auto& [subset, idx] : part.blocks) {
            if (subset.contains(k)) continue;
            const bool missing = std::any_of(idx.begin(), idx.end(), [&](auto i) { return !ks.knows(want, i); });
            if (missing) {
                out.failure = "block W'_{" + std::to_string(want + 1) + "," + to_string(subset) +
                              "} not fully recovered; short by " + std::to_string(out.deficit) + " symbols";
                break;
            }
        }
        if (!first_stuck.empty()) out.failure += " (" + first_stuck + ")";
        return out;
    }

    // Every recovered coded symbol must match the source.
    const auto& cw = lib.coded.at(want);
    for (const auto& p : ks.points(want)) {
        if (cw[p.index] != p.value) {
            out.failure = "recovered coded symbol " + std::to_string(p.index) + " is wrong";
            return out;
        }
    }
    if (lib.materialized()) {
        auto pts = ks.points(want);
        pts.resize(params.file_len);
        const auto decoded = ReedSolomonCodec(*lib.codec).decode(pts);
        if (decoded != lib.messages.at(want)) {
            out.failure = "decoded file differs from the original";
            return out;
        }
    }
    out.bit_exact = true;
    out.success = true;
    return out;
}

/// Incremental row echelon basis over GF(2^w).
class EchelonBasis {
public:
    EchelonBasis(const GaloisField& field, std::size_t columns) : field_(&field), columns_(columns) {}

    /// Returns true when the row increased the rank.
    bool insert(std::vector<Symbol> row) {
        reduce(row);
        for (std::size_t c = 0; c < columns_; ++c) {
            if (row[c] == 0) continue;
            const Symbol inv = field_->inv(row[c]);
            for (std::size_t i = c; i < columns_; ++i) row[i] = field_->mul(row[i], inv);
            rows_.push_back(std::move(row));
            pivots_.push_back(c);
            return true;
        }
        return false;
    }

    bool in_span(std::vector<Symbol> row) const {
        reduce(row);
        return std::all_of(row.begin(), row.end(), [](Symbol s) { return s == 0; });
    }

    std::size_t rank() const { return rows_.size(); }

private:
    void reduce(std::vector<Symbol>& row) const {
        for (std::size_t b = 0; b < rows_.size(); ++b) {
            const Symbol coef = row[pivots_[b]];
            if (coef == 0) continue;
            const auto& base = rows_[b];
            for (std::size_t i = pivots_[b]; i < columns_; ++i) row[i] ^= field_->mul(coef, base[i]);
        }
    }

    const GaloisField* field_;
    std::size_t columns_;
    std::vector<std::vector<Symbol>> rows_;
    std::vector<std::size_t> pivots_;
};

inline DecodeOutcome decode_exact(unsigned k, const SystemParams& params, const CacheContents& cache,
                                  std::span<const std::uint32_t> active, const DeliverySchedule& schedule,
                                  const Library& lib) {
    if (!lib.materialized()) throw InvalidParams("exact decoding needs a materialized codec (small F)");
    const ReedSolomonCodec codec(*lib.codec);
    const auto& d = schedule.demand;
    const auto view = receiver_view(params, cache, active, schedule);
    const std::uint64_t f = params.file_len;

    std::map<std::uint32_t, std::size_t> column_of;
    for (const auto& [file, part] : view.parts) column_of.emplace(file, column_of.size() * f);
    const std::size_t columns = column_of.size() * f;

    std::map<std::uint32_t, std::vector<std::vector<Symbol>>> rows_cache;
    auto generator = [&](std::uint32_t index) -> const std::vector<Symbol>& {
        auto& slot = rows_cache[index];
        if (slot.empty()) slot.push_back(codec.generator_row(index));
        return slot.front();
    };
    auto add_term = [&](std::vector<Symbol>& row, std::uint32_t file, std::uint32_t index) {
        const auto& g = generator(index);
        const auto base = column_of.at(file);
        for (std::uint64_t t = 0; t < f; ++t) row[base + t] ^= g[t];
    };

    EchelonBasis basis(codec.field(), columns);
    for (const auto& [file, base] : column_of) {
        for (auto idx : cache.indices(active[k], file)) {
            std::vector<Symbol> row(columns, 0);
            add_term(row, file, idx);
            basis.insert(std::move(row));
        }
    }
    for (const auto& m : schedule.messages) {
        if (m.kind == MessageKind::top_up) {
            for (auto idx : m.direct_indices) {
                std::vector<Symbol> row(columns, 0);
                add_term(row, m.components.front().file, idx);
                basis.insert(std::move(row));
            }
            continue;
        }
        for (std::uint64_t i = 0; i < m.length; ++i) {
            std::vector<Symbol> row(columns, 0);
            for (auto x : m.subset.members()) {
                const auto& b = view.parts.at(d[x]).block(m.subset.without(x));
                if (i < b.size()) add_term(row, d[x], b[i]);
            }
            basis.insert(std::move(row));
        }
    }

    DecodeOutcome out;
    const auto base = column_of.at(d[k]);
    std::uint64_t missing = 0;
    for (std::uint64_t t = 0; t < f; ++t) {
        std::vector<Symbol> unit(columns, 0);
        unit[base + t] = 1;
        if (!basis.in_span(std::move(unit))) ++missing;
    }
    out.known_symbols = f - missing;
    out.deficit = missing;
    out.success = missing == 0;
    if (!out.success) {
        out.failure = std::to_string(missing) + " message symbols of file " + std::to_string(d[k] + 1) +
                      " outside the received span";
    }
    return out;
}

} // namespace detail

/// Can active user k rebuild its requested file from its cache plus the
/// broadcast? `lib` supplies the user's own cached values and the ground
/// truth used for the bit-exact check.
inline DecodeOutcome decode_user(unsigned k, const SystemParams& params, const CacheContents& cache,
                                 std::span<const std::uint32_t> active, const DeliverySchedule& schedule,
                                 const Library& lib, DecodeMode mode = DecodeMode::accounting) {
    if (k >= schedule.num_active) throw InvalidParams("user position outside [0, K)");
    if (mode == DecodeMode::exact) return detail::decode_exact(k, params, cache, active, schedule, lib);
    return detail::decode_accounting(k, params, cache, active, schedule, lib);
}

// ---- Monte Carlo harness -------------------------------------------------

enum class VerifyMode { accounting, exact, both };

inline const char* to_string(VerifyMode m) {
    switch (m) {
    case VerifyMode::accounting: return "accounting";
    case VerifyMode::exact: return "exact";
    case VerifyMode::both: return "both";
    }
    return "?";
}

struct TrialOptions {
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    VerifyMode mode = VerifyMode::accounting;
    unsigned jobs = 1;
    bool top_up = true;
    /// Use the codec when it fits; otherwise coded symbols are random.
    bool materialize = true;
};

struct TrialResult {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> active;
    RequestVector demand;
    std::uint64_t coded_symbols = 0;
    std::uint64_t fallback_symbols = 0;
    std::uint64_t top_up_symbols = 0;
    std::vector<std::pair<unsigned, std::uint64_t>> level_symbols;  // (j, symbols sent)
    std::vector<bool> decoded;         // primary verdict per active user
    std::vector<bool> exact_decoded;   // filled in `both` mode
    bool modes_agree = true;
    bool codec_materialized = false;
    std::vector<std::string> failures;

    std::uint64_t total_symbols() const { return coded_symbols + fallback_symbols + top_up_symbols; }
    bool all_decoded() const { return std::all_of(decoded.begin(), decoded.end(), [](bool b) { return b; }); }
};

struct TrialStats {
    SystemParams params;
    std::optional<RequestVector> demand;  // nullopt: worst case
    TrialOptions options;
    std::vector<TrialResult> trials;
    double mean_rate = 0;
    double std_rate = 0;                  // sample standard deviation
    double success_fraction = 0;          // over (user, trial)
    double mean_top_up_fraction = 0;      // top-up symbols / all symbols
    std::uint64_t fallback_events = 0;
    std::uint64_t mode_disagreements = 0;
    std::map<unsigned, double> mean_level_symbols;
};

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return mix64(seed ^ mix64(trial ^ 0xC0DEDCA4EULL));
}

inline TrialResult run_trial(const SystemParams& params, const std::optional<RequestVector>& demand,
                             const TrialOptions& opt, std::uint64_t trial) {
    TrialResult tr;
    tr.trial = trial;
    tr.seed = trial_seed(opt.seed, trial);
    std::mt19937_64 engine(tr.seed);
    tr.active = choose_active_users(params, engine);
    tr.demand = demand.value_or(worst_case_demand(params.num_files, params.num_active));

    std::vector<std::uint32_t> files(tr.demand.files);
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());

    const auto cache = prefetch(params, PlacementSeed{engine()}, tr.active, files);
    const bool materialize = opt.materialize && codec_fits(params);
    if (opt.mode != VerifyMode::accounting && !materialize) {
        throw InvalidParams("exact verification needs F <= " + std::to_string(kMaxMaterializedFileLen) +
                            " and rF below the field size");
    }
    const Library lib = make_library(params, files, engine, materialize);
    tr.codec_materialized = lib.materialized();

    const auto schedule = deliver(params, cache, tr.active, tr.demand, lib.coded, {.top_up = opt.top_up});
    tr.coded_symbols = schedule.coded_symbols;
    tr.fallback_symbols = schedule.fallback_symbols;
    tr.top_up_symbols = schedule.top_up_symbols;
    for (const auto& it : schedule.iterations) tr.level_symbols.emplace_back(it.level, it.sent_symbols);

    for (unsigned k = 0; k < params.num_active; ++k) {
        if (opt.mode != VerifyMode::exact) {
            const auto acc = decode_user(k, params, cache, tr.active, schedule, lib, DecodeMode::accounting);
            tr.decoded.push_back(acc.success);
            if (!acc.success) tr.failures.push_back("user " + std::to_string(k + 1) + ": " + acc.failure);
        }
        if (opt.mode != VerifyMode::accounting) {
            const auto ex = decode_user(k, params, cache, tr.active, schedule, lib, DecodeMode::exact);
            if (opt.mode == VerifyMode::exact) {
                tr.decoded.push_back(ex.success);
                if (!ex.success) tr.failures.push_back("user " + std::to_string(k + 1) + ": " + ex.failure);
            } else {
                tr.exact_decoded.push_back(ex.success);
                if (ex.success != tr.decoded.back()) tr.modes_agree = false;
            }
        }
    }
    return tr;
}

/// Independent trials; the result does not depend on `jobs`.
inline TrialStats run_trials(const SystemParams& params, const std::optional<RequestVector>& demand,
                             const TrialOptions& opt) {
    require_valid(params);
    if (opt.trials < 1) throw InvalidParams("trials must be at least 1");
    if (demand) {
        if (const auto v = validate(*demand, params); !v.empty()) throw InvalidParams(v.front().message);
    }
    TrialStats st;
    st.params = params;
    st.demand = demand;
    st.options = opt;
    st.trials.resize(opt.trials);

    const unsigned jobs = std::max(1U, std::min<unsigned>(opt.jobs, static_cast<unsigned>(opt.trials)));
    if (jobs == 1) {
        for (std::uint64_t t = 0; t < opt.trials; ++t) st.trials[t] = run_trial(params, demand, opt, t);
    } else {
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::uint64_t t = w; t < opt.trials; t += jobs) st.trials[t] = run_trial(params, demand, opt, t);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    const double f = static_cast<double>(params.file_len);
    double sum = 0, sum_top = 0, ok = 0, users = 0;
    std::map<unsigned, double> level_sum;
    for (const auto& tr : st.trials) {
        sum += static_cast<double>(tr.total_symbols()) / f;
        if (tr.total_symbols() > 0) sum_top += static_cast<double>(tr.top_up_symbols) / tr.total_symbols();
        for (bool b : tr.decoded) ok += b ? 1 : 0;
        users += static_cast<double>(tr.decoded.size());
        st.fallback_events += tr.fallback_symbols > 0 ? 1 : 0;
        st.mode_disagreements += tr.modes_agree ? 0 : 1;
        for (const auto& [j, n] : tr.level_symbols) level_sum[j] += static_cast<double>(n);
    }
    const double count = static_cast<double>(st.trials.size());
    st.mean_rate = sum / count;
    st.mean_top_up_fraction = sum_top / count;
    st.success_fraction = users > 0 ? ok / users : 0;
    for (const auto& [j, s] : level_sum) st.mean_level_symbols[j] = s / count;
    if (st.trials.size() > 1) {
        double ss = 0;
        for (const auto& tr : st.trials) {
            const double x = static_cast<double>(tr.total_symbols()) / f - st.mean_rate;
            ss += x * x;
        }
        st.std_rate = std::sqrt(ss / (count - 1));
    }
    return st;
}

struct TheoryReport {
    Rational theory;
    bool worst_case = true;     // J = min(N, K); otherwise N(d) of the given demand
    double empirical_mean = 0;
    double empirical_std = 0;
    double relative_error = 0;
    double top_up_fraction = 0;
    double success_fraction = 0;
    double tolerance = 0;
    bool pass = false;
    std::string message;
};

inline TheoryReport compare_to_theory(const TrialStats& st, double tolerance) {
    TheoryReport rep;
    const auto& p = st.params;
    rep.worst_case = !st.demand.has_value();
    const auto distinct = st.demand ? distinct_requests(*st.demand) : std::min(p.num_files, p.num_active);
    rep.theory = rate_mds_dec_for_demand(p.num_files, p.cache_size, p.num_active, p.expansion, distinct);
    rep.empirical_mean = st.mean_rate;
    rep.empirical_std = st.std_rate;
    rep.top_up_fraction = st.mean_top_up_fraction;
    rep.success_fraction = st.success_fraction;
    rep.tolerance = tolerance;
    const double theory = to_double(rep.theory);
    rep.relative_error = theory != 0 ? std::abs(st.mean_rate - theory) / theory : std::abs(st.mean_rate);

    if (!(tolerance > 0)) {
        rep.pass = false;
        rep.message = "tolerance must be positive: random placement at finite F never matches the "
                      "asymptotic rate exactly";
        return rep;
    }
    if (st.success_fraction < 1) {
        rep.message = "decode failures in " + std::to_string((1 - st.success_fraction) * 100) + "% of user trials";
        return rep;
    }
    rep.pass = rep.relative_error <= tolerance;
    rep.message = rep.pass ? "empirical rate within tolerance of the analytical rate"
                           : "empirical rate outside tolerance of the analytical rate";
    return rep;
}

// ---- Serialization --------------------------------------------------------

/// Provisioned user ids are 1-based on the wire, like file indices.
inline std::vector<std::uint32_t> one_based(std::vector<std::uint32_t> ids) {
    for (auto& id : ids) ++id;
    return ids;
}

inline void to_json(nlohmann::json& j, const TrialResult& t) {
    j = nlohmann::json{{"trial", t.trial},
                       {"seed", t.seed},
                       {"active_users", one_based(t.active)},
                       {"demand", t.demand},
                       {"coded_symbols", t.coded_symbols},
                       {"fallback_symbols", t.fallback_symbols},
                       {"top_up_symbols", t.top_up_symbols},
                       {"codec_materialized", t.codec_materialized},
                       {"decoded", t.decoded}};
    auto levels = nlohmann::json::array();
    for (const auto& [lvl, n] : t.level_symbols) levels.push_back({{"j", lvl}, {"symbols", n}});
    j["levels"] = levels;
    if (!t.exact_decoded.empty()) {
        j["exact_decoded"] = t.exact_decoded;
        j["modes_agree"] = t.modes_agree;
    }
    if (!t.failures.empty()) j["failures"] = t.failures;
}

inline void to_json(nlohmann::json& j, const TheoryReport& r) {
    j = nlohmann::json{{"theory", to_string(r.theory)},
                       {"theory_decimal", to_decimal(r.theory)},
                       {"rate_variant", r.worst_case ? "worst-case J=min(N,K)" : "per-demand N(d)"},
                       {"empirical_mean", r.empirical_mean},
                       {"empirical_std", r.empirical_std},
                       {"relative_error", r.relative_error},
                       {"top_up_fraction", r.top_up_fraction},
                       {"success_fraction", r.success_fraction},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass},
                       {"message", r.message}};
}

} // namespace mdscache
