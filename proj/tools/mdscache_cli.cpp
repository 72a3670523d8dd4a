/**************************************************************************
 * mdscache_cli.cpp
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

// Command-line front end: closed-form rates, parameter sweeps, Monte Carlo
// simulation of the placement/delivery protocol, and the self test.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mdscache/mdscache.hpp>

namespace {

using namespace mdscache;
using nlohmann::json;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

/// Options as given on the command line; unset ones fall back to --config.
struct Flags {
    std::string config_path;
    std::optional<std::uint32_t> n, k, k_prime;
    std::optional<std::string> m, r;
    std::optional<std::uint64_t> f;
    std::optional<unsigned> field_width;
    std::optional<std::string> demand;
    std::optional<std::uint64_t> trials, seed;
    std::optional<unsigned> jobs;
    std::optional<double> tolerance;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    bool no_top_up = false;
    // sweep
    std::optional<std::string> axis, from, to, step;
};

struct SweepSpec {
    std::string axis;
    Rational from, to, step;
    std::vector<Rational> expansions;
};

struct ExperimentConfig {
    SystemParams params;
    std::optional<RequestVector> demand;  // nullopt: worst case
    std::vector<Rational> expansions;     // every r given (rate/sweep)
    std::optional<SweepSpec> sweep;
    std::uint64_t trials = 20;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    double tolerance = 0.02;
    std::string out;
    VerifyMode mode = VerifyMode::accounting;
    bool top_up = true;
};

json to_json_config(const ExperimentConfig& c) {
    json j;
    j["params"] = c.params;
    if (c.params.file_len == 0) j["params"].erase("F");
    j["demand"] = c.demand ? json(*c.demand) : json("worst-case");
    if (c.expansions.size() > 1) {
        auto rs = json::array();
        for (const auto& r : c.expansions) rs.push_back(to_string(r));
        j["r_list"] = rs;
    }
    if (c.sweep) {
        auto rs = json::array();
        for (const auto& r : c.sweep->expansions) rs.push_back(to_string(r));
        j["sweep"] = {{"axis", c.sweep->axis}, {"from", to_string(c.sweep->from)},
                      {"to", to_string(c.sweep->to)}, {"step", to_string(c.sweep->step)}, {"r", rs}};
    }
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["tolerance"] = c.tolerance;
    j["mode"] = to_string(c.mode);
    j["top_up"] = c.top_up;
    if (!c.out.empty()) j["out"] = c.out;
    return j;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_rational(item));
    }
    if (out.empty()) throw InvalidParams("empty list: '" + text + "'");
    return out;
}

RequestVector parse_demand(const std::string& text) {
    RequestVector d;
    for (const auto& v : parse_rational_list(text)) {
        if (!is_integer(v) || v < 1) throw InvalidParams("demand entries are 1-based file indices");
        d.files.push_back(numerator(v).convert_to<std::uint32_t>() - 1);
    }
    return d;
}

VerifyMode parse_mode(const std::string& s) {
    if (s == "accounting") return VerifyMode::accounting;
    if (s == "exact") return VerifyMode::exact;
    if (s == "both") return VerifyMode::both;
    throw InvalidParams("mode must be accounting, exact or both");
}

/// Config file first, flags on top.
ExperimentConfig resolve(const Flags& fl) {
    json file = json::object();
    if (!fl.config_path.empty()) {
        std::ifstream in(fl.config_path);
        if (!in) throw InvalidParams("cannot open config file " + fl.config_path);
        file = json::parse(in);
    }
    ExperimentConfig c;
    json pj = file.value("params", json::object());
    if (fl.n) pj["N"] = *fl.n;
    if (fl.k) pj["K"] = *fl.k;
    if (fl.k_prime) pj["K_prime"] = *fl.k_prime;
    if (fl.m) pj["M"] = *fl.m;
    if (fl.f) pj["F"] = *fl.f;
    if (fl.field_width) pj["field_width"] = *fl.field_width;

    std::string r_text;
    if (fl.r) r_text = *fl.r;
    else if (file.contains("r_list")) {
        for (const auto& r : file["r_list"]) r_text += (r_text.empty() ? "" : ",") + r.get<std::string>();
    } else if (pj.contains("r")) {
        r_text = pj["r"].is_string() ? pj["r"].get<std::string>() : pj["r"].dump();
    }
    c.expansions = r_text.empty() ? std::vector<Rational>{1} : parse_rational_list(r_text);
    pj["r"] = to_string(c.expansions.front());
    for (const char* key : {"N", "K", "M"}) {
        if (!pj.contains(key)) throw InvalidParams(std::string("missing parameter ") + key);
    }
    if (!pj.contains("F")) pj["F"] = 0;
    c.params = pj.get<SystemParams>();

    if (fl.demand) {
        if (*fl.demand != "worst-case") c.demand = parse_demand(*fl.demand);
    } else if (file.contains("demand") && file["demand"].is_array()) {
        c.demand = file["demand"].get<RequestVector>();
    }
    c.trials = fl.trials.value_or(file.value("trials", c.trials));
    c.seed = fl.seed.value_or(file.value("seed", c.seed));
    c.jobs = fl.jobs.value_or(file.value("jobs", c.jobs));
    c.tolerance = fl.tolerance.value_or(file.value("tolerance", c.tolerance));
    c.out = fl.out.value_or(file.value("out", std::string{}));
    if (fl.mode) c.mode = parse_mode(*fl.mode);
    else if (file.contains("mode")) c.mode = parse_mode(file["mode"].get<std::string>());
    c.top_up = !fl.no_top_up && file.value("top_up", true);

    if (fl.axis || file.contains("sweep")) {
        const json sj = file.value("sweep", json::object());
        SweepSpec s;
        s.axis = fl.axis.value_or(sj.value("axis", std::string{}));
        auto rat = [&](const std::optional<std::string>& flag, const char* key) -> Rational {
            if (flag) return parse_rational(*flag);
            if (!sj.contains(key)) throw InvalidParams(std::string("sweep needs --") + key);
            return detail::rational_from_json(sj[key]);
        };
        s.from = rat(fl.from, "from");
        s.to = rat(fl.to, "to");
        s.step = fl.step || sj.contains("step") ? rat(fl.step, "step") : Rational(1);
        s.expansions = c.expansions;
        c.sweep = s;
    }
    return c;
}

void fail_on_violations(const std::vector<Violation>& v) {
    if (v.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& e : v) msg += "\n  " + e.message;
    throw InvalidParams(msg);
}

void add_param_flags(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--config", fl.config_path, "JSON config file; flags override its keys");
    cmd->add_option("--n", fl.n, "number of files N");
    cmd->add_option("--k", fl.k, "number of requesting users K");
    cmd->add_option("--k-prime", fl.k_prime, "number of provisioned users K' (default K)");
    cmd->add_option("--m", fl.m, "cache size M in files (rational, e.g. 1/2)");
    cmd->add_option("--r", fl.r, "MDS expansion r (rational, e.g. 3/2); comma list allowed for rate/sweep");
    cmd->add_option("--f", fl.f, "file length F in symbols");
    cmd->add_option("--field-width", fl.field_width, "symbol field width, 8 or 16");
    cmd->add_option("--demand", fl.demand, "1-based demand vector like 1,2,1, or worst-case");
}

// ---- rate -----------------------------------------------------------------

int cmd_rate(const Flags& fl) {
    const auto c = resolve(fl);
    const auto& p = c.params;
    fail_on_violations(detail::validate_rate_inputs(p.num_files, p.num_active, p.cache_size, p.expansion));
    std::optional<std::uint32_t> distinct;
    if (c.demand) {
        fail_on_violations(validate(*c.demand, p));
        distinct = distinct_requests(*c.demand);
    }
    for (const auto& r : c.expansions) {
        fail_on_violations(detail::validate_rate_inputs(p.num_files, p.num_active, p.cache_size, r));
    }

    std::printf("N=%u K=%u M=%s  (%s)\n", p.num_files, p.num_active, to_string(p.cache_size).c_str(),
                distinct ? ("per-demand, N(d)=" + std::to_string(*distinct)).c_str() : "worst case, J=min(N,K)");
    std::printf("%-22s %-28s %s\n", "scheme", "rate (exact)", "rate (decimal)");
    auto row = [](const std::string& name, const Rational& v) {
        std::printf("%-22s %-28s %s\n", name.c_str(), to_string(v).c_str(), to_decimal(v).c_str());
    };
    if (c.demand && distinct != std::min(p.num_files, p.num_active)) {
        std::printf("note: uncoded baselines are worst-case values\n");
    }
    row("uncoded-dec", rate_uncoded_dec(p.num_files, p.cache_size, p.num_active));
    row("uncoded-cen", rate_uncoded_cen(p.num_files, p.cache_size, p.num_active));
    for (const auto& r : c.expansions) {
        const auto ev = evaluate_theorem(p.num_files, p.cache_size, p.num_active, r, distinct);
        row("mds-dec@r=" + to_string(r), ev.rate);
    }
    return 0;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const Flags& fl) {
    auto c = resolve(fl);
    if (!c.sweep) throw InvalidParams("sweep needs --axis K|M|r with --from/--to");
    const auto& s = *c.sweep;
    if (s.axis != "K" && s.axis != "M" && s.axis != "r") throw InvalidParams("sweep axis must be K, M or r");
    const auto points = rational_range(s.from, s.to, s.step);
    if (s.axis == "K") {
        for (const auto& v : points) {
            if (!is_integer(v) || v < 1) throw InvalidParams("K sweep values must be positive integers");
        }
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) throw InvalidParams("cannot write " + c.out);
        os = &file;
    }
    *os << "# mdscache sweep\n# config: " << to_json_config(c).dump() << "\n";

    const std::vector<Rational> mds_r = s.axis == "r" ? std::vector<Rational>{} : s.expansions;
    std::vector<std::string> cols{"uncoded_dec"};
    if (s.axis == "r") cols.push_back("mds_dec");
    for (const auto& r : mds_r) cols.push_back("mds_dec@r=" + to_string(r));
    cols.push_back("uncoded_cen");
    *os << s.axis;
    for (const auto& col : cols) *os << "," << col;
    for (const auto& col : cols) *os << "," << col << "_exact";
    *os << "\n";

    for (const auto& v : points) {
        std::uint32_t n = c.params.num_files, k = c.params.num_active;
        Rational m = c.params.cache_size;
        if (s.axis == "K") k = numerator(v).convert_to<std::uint32_t>();
        if (s.axis == "M") m = v;
        std::vector<std::optional<Rational>> vals;
        auto guarded = [&](auto&& fn) -> std::optional<Rational> {
            try {
                return fn();
            } catch (const InvalidParams& e) {
                std::cerr << "warning: " << s.axis << "=" << to_string(v) << ": " << e.what() << "\n";
                return std::nullopt;
            }
        };
        vals.push_back(guarded([&] { return rate_uncoded_dec(n, m, k); }));
        if (s.axis == "r") vals.push_back(guarded([&] { return rate_mds_dec(n, m, k, v); }));
        for (const auto& r : mds_r) vals.push_back(guarded([&] { return rate_mds_dec(n, m, k, r); }));
        vals.push_back(guarded([&] { return rate_uncoded_cen(n, m, k); }));
        *os << to_string(v);
        for (const auto& x : vals) *os << "," << (x ? to_decimal(*x) : "");
        for (const auto& x : vals) *os << "," << (x ? to_string(*x) : "");
        *os << "\n";
    }
    return 0;
}

// ---- simulate / verify ----------------------------------------------------

int cmd_simulate(const Flags& fl, bool verify_alias) {
    auto c = resolve(fl);
    if (verify_alias && !fl.mode) c.mode = VerifyMode::both;
    if (c.params.num_provisioned == 0) c.params.num_provisioned = c.params.num_active;
    fail_on_violations(validate(c.params));
    if (c.demand) fail_on_violations(validate(*c.demand, c.params));
    if (c.expansions.size() != 1) throw InvalidParams("simulate takes a single r");

    TrialOptions opt;
    opt.trials = c.trials;
    opt.seed = c.seed;
    opt.jobs = c.jobs;
    opt.mode = c.mode;
    opt.top_up = c.top_up;
    const auto stats = run_trials(c.params, c.demand, opt);
    const auto report = compare_to_theory(stats, c.tolerance);
    const json config = to_json_config(c);

    if (!c.out.empty()) {
        std::ofstream lines(c.out + ".trials.jsonl");
        if (!lines) throw InvalidParams("cannot write " + c.out + ".trials.jsonl");
        // Scheduling knobs do not affect results; keep them out of the replay log.
        json replay = config;
        replay.erase("jobs");
        replay.erase("out");
        for (const auto& t : stats.trials) lines << json{{"config", replay}, {"result", t}}.dump() << "\n";
        std::ofstream rep(c.out + ".report.json");
        json levels = json::object();
        for (const auto& [j, v] : stats.mean_level_symbols) levels[std::to_string(j)] = v;
        rep << json{{"config", config},
                    {"report", report},
                    {"mean_level_symbols", levels},
                    {"fallback_trials", stats.fallback_events},
                    {"mode_disagreements", stats.mode_disagreements}}
                   .dump(2)
            << "\n";
    }

    std::printf("trials              %llu (seed %llu, mode %s)\n", static_cast<unsigned long long>(c.trials),
                static_cast<unsigned long long>(c.seed), to_string(c.mode));
    std::printf("analytical rate     %s = %s (%s)\n", to_string(report.theory).c_str(),
                to_decimal(report.theory).c_str(), report.worst_case ? "worst case" : "per demand");
    std::printf("empirical rate      %.6f +- %.6f (sample std)\n", report.empirical_mean, report.empirical_std);
    std::printf("relative error      %.4f%% (tolerance %.4f%%)\n", 100 * report.relative_error, 100 * c.tolerance);
    std::printf("top-up fraction     %.4f%%\n", 100 * report.top_up_fraction);
    std::printf("decode success      %.2f%%\n", 100 * report.success_fraction);
    if (c.mode == VerifyMode::both) {
        std::printf("mode disagreements  %llu\n", static_cast<unsigned long long>(stats.mode_disagreements));
    }
    std::printf("%s: %s\n", report.pass ? "PASS" : "FAIL", report.message.c_str());
    const bool ok = report.pass && stats.mode_disagreements == 0;
    return ok ? 0 : kExitFail;
}

// ---- selftest -------------------------------------------------------------

int cmd_selftest(const std::string& fault) {
    SelftestOptions opt;
    if (fault == "field") opt.corrupt_field = true;
    else if (!fault.empty()) throw InvalidParams("unknown fault '" + fault + "' (supported: field)");
    int failed = 0;
    for (const auto& r : run_selftest(opt)) {
        std::printf("[%s] %s  (%s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        failed += r.pass ? 0 : 1;
    }
    std::printf("%d check(s) failed\n", failed);
    return failed == 0 ? 0 : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mdscache: decentralized coded caching with MDS-coded prefetching"};
    app.require_subcommand(1);
    Flags fl;

    auto* rate = app.add_subcommand("rate", "closed-form rates of the uncoded baselines and the MDS scheme");
    add_param_flags(rate, fl);

    auto* sweep = app.add_subcommand("sweep", "rates along one axis (K, M or r) as CSV");
    add_param_flags(sweep, fl);
    sweep->add_option("--axis", fl.axis, "K, M or r");
    sweep->add_option("--from", fl.from, "first axis value");
    sweep->add_option("--to", fl.to, "last axis value (inclusive)");
    sweep->add_option("--step", fl.step, "axis step (default 1)");
    sweep->add_option("--out", fl.out, "CSV path (default stdout)");

    std::vector<CLI::App*> sims;
    sims.push_back(app.add_subcommand("simulate", "Monte Carlo placement + delivery + decoding"));
    sims.push_back(app.add_subcommand("verify", "simulate with rank-analysis cross-check (small F)"));
    for (auto* cmd : sims) {
        add_param_flags(cmd, fl);
        cmd->add_option("--trials", fl.trials, "number of trials");
        cmd->add_option("--seed", fl.seed, "master seed");
        cmd->add_option("--jobs", fl.jobs, "worker threads");
        cmd->add_option("--tolerance", fl.tolerance, "relative tolerance against the analytical rate");
        cmd->add_option("--out", fl.out, "output base path (<out>.trials.jsonl, <out>.report.json)");
        cmd->add_option("--mode", fl.mode, "accounting, exact or both");
        cmd->add_flag("--no-top-up", fl.no_top_up, "disable finite-F repair symbols");
    }

    std::string fault;
    auto* selftest = app.add_subcommand("selftest", "golden values and property checks");
    selftest->add_option("--inject-fault", fault, "negative control: corrupt a component (field)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (rate->parsed()) return cmd_rate(fl);
        if (sweep->parsed()) return cmd_sweep(fl);
        if (sims[0]->parsed()) return cmd_simulate(fl, false);
        if (sims[1]->parsed()) return cmd_simulate(fl, true);
        if (selftest->parsed()) return cmd_selftest(fault);
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: bad config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
