#pragma once

// Command-line front end: verify, normalize, intersection, rules.
// Exit codes: 0 all pass, 1 verification failure, 2 usage or configuration error.

#include "gwv/catalog.hpp"
#include "gwv/expr/parse.hpp"
#include "gwv/expr/print.hpp"
#include "gwv/fidelity.hpp"
#include "gwv/oracle/check.hpp"
#include "gwv/oracle/intersection.hpp"
#include "gwv/rewrite/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace gwv::cli {

enum Exit : int { kPass = 0, kFail = 1, kUsage = 2 };

/// Every knob of a run. Defaults reproduce the acceptance runs.
struct RunConfig {
    std::vector<std::string> names;
    bool numeric_only = false;
    bool symbolic_only = false;
    unsigned trials = 20;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool json = false;
    bool timings = false;
    bool verbose = false;
    rewrite::MembershipBounds bounds;
    oracle::NumericPolicy policy;
    std::string cache;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::ordered_json to_json(const Report& r, bool timings) {
    nlohmann::ordered_json j;
    j["identity"] = r.identity;
    j["mode"] = r.mode;
    j["outcome"] = to_string(r.outcome);
    j["path"] = r.path;
    j["certificate_entries"] = r.certificate_entries;
    j["residual_terms"] = r.residual_terms;
    if (r.mode == "numeric") j["trials"] = r.trials.size();
    else j["trials"] = nullptr;
    if (r.seed) j["seed"] = *r.seed;
    else j["seed"] = nullptr;
    if (timings) j["elapsed_ms"] = r.elapsed_ms;
    else j["elapsed_ms"] = nullptr;
    j["engine_config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.engine_config) j["engine_config"][k] = v;
    j["residual"] = r.residual;
    j["notes"] = r.notes;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline void print_text(std::ostream& out, const Report& r, const RunConfig& cfg) {
    out << to_string(r.outcome) << "  " << r.identity << "  " << r.mode << "  " << r.path;
    if (r.path == "certificate") out << "  entries=" << r.certificate_entries;
    if (r.mode == "numeric") out << "  trials=" << r.trials.size() << " seed=" << r.seed.value_or(0);
    if (cfg.timings) out << "  (" << std::fixed << std::setprecision(1) << r.elapsed_ms << " ms)";
    out << "\n";
    if (!r.error.empty()) out << "  error: " << r.error << "\n";
    if (!r.passed() && !r.residual.empty()) {
        out << "  residual (" << r.residual_terms << " terms): ";
        constexpr std::size_t cap = 4000;
        if (r.residual.size() > cap || cfg.verbose)
            out << (cfg.verbose ? r.residual : r.residual.substr(0, cap) + " ... (use --verbose or --json)");
        else
            out << r.residual;
        out << "\n";
    }
    if (cfg.verbose) {
        for (const auto& n : r.notes) out << "  note: " << n << "\n";
        for (const auto& [k, v] : r.engine_config) out << "  " << k << " = " << v << "\n";
    }
}

// ---------------------------------------------------------------------------
// Commands

inline std::string resolve_cache(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("GWV_CACHE")) return env;
    return {};
}

inline void load_cache(const std::string& path) {
    if (path.empty() || !std::filesystem::exists(path)) return;
    oracle::default_cache().load(path);
}

inline void save_cache(const std::string& path) {
    if (!path.empty()) oracle::default_cache().save(path);
}

struct Task {
    const IdentityStatement* st;
    bool numeric;
};

inline std::vector<Task> plan(const RunConfig& cfg) {
    std::set<std::string> wanted;
    bool all = cfg.names.empty();
    for (const auto& n : cfg.names) {
        if (n == "all") all = true;
        else wanted.insert(n);
    }
    if (all) {
        auto v = catalog::names();
        wanted.insert(v.begin(), v.end());
    }
    std::vector<Task> tasks;
    for (const auto& n : wanted) {
        const IdentityStatement* st;
        try {
            st = &catalog::identity(n);
        } catch (const std::out_of_range&) {
            throw UsageError("unknown identity '" + n + "'");
        }
        bool sym = st->mode != Mode::Numeric && !cfg.numeric_only;
        bool num = st->mode != Mode::Symbolic && !cfg.symbolic_only;
        if (sym) tasks.push_back({st, false});
        if (num) tasks.push_back({st, true});
    }
    if (tasks.empty()) throw UsageError("nothing to verify with the selected mode");
    return tasks;
}

/// Runs the tasks on up to cfg.jobs threads; results keep task order.
inline std::vector<Report> run_tasks(const std::vector<Task>& tasks, const RunConfig& cfg) {
    std::vector<Report> reports(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < tasks.size();) {
            const auto& t = tasks[i];
            if (t.numeric) {
                reports[i] = oracle::check_identity_numeric(*t.st, cfg.trials, cfg.seed, cfg.policy);
            } else {
                rewrite::VerifyConfig vc;
                vc.bounds = cfg.bounds;
                reports[i] = rewrite::verify_identity(*t.st, vc);
            }
        }
    };
    unsigned n = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(tasks.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return reports;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    auto tasks = plan(cfg);
    std::string cache = resolve_cache(cfg.cache);
    load_cache(cache);
    auto reports = run_tasks(tasks, cfg);
    save_cache(cache);

    std::size_t passed = 0;
    for (const auto& r : reports) passed += r.passed();
    if (cfg.json) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : reports) arr.push_back(to_json(r, cfg.timings));
        out << arr.dump(2) << "\n";
    } else {
        for (const auto& r : reports) print_text(out, r, cfg);
        out << "summary: " << passed << "/" << reports.size() << " passed\n";
    }
    return passed == reports.size() ? kPass : kFail;
}

inline int cmd_normalize(std::string text, int max_g0, int max_g1, std::istream& in, std::ostream& out) {
    if (text.empty() || text == "-") text.assign(std::istreambuf_iterator<char>(in), {});
    auto e = expr::parse(text);
    auto p = rewrite::expand_definitional(e);
    out << "expansion: " << expr::print_canonical(p) << "\n";
    auto q = rewrite::trr_reduce(p, rewrite::build_ruleset(max_g0, max_g1));
    out << "reduced:   " << expr::print_canonical(q) << "\n";
    return kPass;
}

inline int cmd_intersection(int g, const std::vector<int>& degrees, const std::string& cache_flag, std::ostream& out) {
    if (g < 0) throw UsageError("genus must be non-negative");
    for (int d : degrees)
        if (d < 0) throw UsageError("degrees must be non-negative");
    std::string cache = resolve_cache(cache_flag);
    load_cache(cache);
    out << oracle::intersection(g, degrees).str() << "\n";
    save_cache(cache);
    return kPass;
}

inline std::string rule_line(const rewrite::RewriteRule& r) {
    expr::Correlator lead{r.genus, {}};
    auto slots = tensors::detail::formal_slots(r.arity);
    for (int i = 0; i < r.arity; ++i) lead.args.push_back(expr::Arg::slot(slots[i], i == 0 ? 1 : 0));
    std::ostringstream s;
    s << "g=" << r.genus << " k=" << r.arity << " (" << r.base << ", order " << r.order << ", " << r.rhs.size()
      << " terms): " << expr::correlator_to_string(lead) << " = " << expr::print_canonical(r.rhs);
    return s.str();
}

inline int cmd_rules(int genus, int arity, bool check, unsigned states, std::uint64_t seed, std::ostream& out) {
    rewrite::RuleSet rs = rewrite::build_ruleset(std::max(7, genus == 0 ? arity : 0),
                                                 std::max(5, genus == 1 ? arity : 0));
    std::vector<const rewrite::RewriteRule*> shown;
    for (const auto& [gk, r] : rs.rules)
        if ((genus < 0 || gk.first == genus) && (arity < 0 || gk.second == arity)) shown.push_back(&r);
    if (shown.empty()) throw UsageError("no generated rule matches the requested genus and arity");
    for (const auto* r : shown) out << rule_line(*r) << "\n";
    if (!check) return kPass;

    bool ok = true;
    for (const auto& c : check_rule_fidelity()) {
        if (genus >= 0 && c.genus >= 0 && c.genus != genus) continue;
        if (arity >= 0 && c.arity != arity) continue;
        out << "fidelity " << c.name;
        if (c.genus >= 0) out << " (g=" << c.genus << ", k=" << c.arity << ")";
        out << ": " << (c.ok ? "PASS" : "FAIL") << "\n";
        if (!c.ok) out << "  residual: " << c.residual << "\n";
        ok &= c.ok;
    }
    rewrite::RuleSet sub;
    for (const auto* r : shown) sub.rules.emplace(std::make_pair(r->genus, r->arity), *r);
    for (const auto& c : check_rule_soundness(sub, states, seed)) {
        out << "soundness g=" << c.genus << " k=" << c.arity << " (" << c.states << " states): "
            << (c.ok ? "PASS" : "FAIL") << "\n";
        if (!c.ok) out << "  nonzero value: " << c.first_nonzero << "\n";
        ok &= c.ok;
    }
    out << "rules --check: " << (ok ? "PASS" : "FAIL") << " (" << shown.size() << " rules)\n";
    return ok ? kPass : kFail;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact verification of tensor identities for Gromov-Witten correlators", "gwverify"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto* verify = app.add_subcommand("verify", "verify catalog identities (names or 'all')");
    verify->add_option("names", cfg.names, "identity names; default all");
    auto* num = verify->add_flag("--numeric-only", cfg.numeric_only, "run only point-model checks");
    verify->add_flag("--symbolic-only", cfg.symbolic_only, "run only symbolic checks")->excludes(num);
    verify->add_option("--trials", cfg.trials, "random states per numeric check")->check(CLI::PositiveNumber);
    verify->add_option("--seed", cfg.seed, "base seed for numeric checks");
    verify->add_option("--jobs,-j", cfg.jobs, "identities verified in parallel")->check(CLI::PositiveNumber);
    verify->add_flag("--json", cfg.json, "emit a JSON array of reports");
    verify->add_flag("--timings", cfg.timings, "include elapsed times (makes output nondeterministic)");
    verify->add_flag("--verbose,-v", cfg.verbose, "print notes, engine settings and full residuals");
    verify->add_option("--max-rounds", cfg.bounds.max_rounds, "membership closure rounds")
        ->check(CLI::PositiveNumber);
    verify->add_option("--max-columns", cfg.bounds.max_columns, "membership column budget")
        ->check(CLI::PositiveNumber);
    verify->add_option("--t-lo", cfg.policy.t_lo, "lowest level of the random point t")->check(CLI::NonNegativeNumber);
    verify->add_option("--t-hi", cfg.policy.t_hi, "highest level of the random point t");
    verify->add_option("--slot-hi", cfg.policy.slot_hi, "highest level of random slot values");
    verify->add_option("--truncation", cfg.policy.truncation, "total-degree truncation (needed when t-lo <= 1)");
    verify->add_option("--cache", cfg.cache, "intersection cache file (default $GWV_CACHE)");

    std::string text;
    int max_g0 = 7, max_g1 = 5;
    auto* normalize = app.add_subcommand("normalize", "expand and TRR-reduce an expression (stdin if omitted)");
    normalize->add_option("expr", text, "expression text, or '-' for stdin");
    normalize->add_option("--max-arity-g0", max_g0, "largest genus-0 rule arity");
    normalize->add_option("--max-arity-g1", max_g1, "largest genus-1 rule arity");

    int g = 0;
    std::vector<int> degrees;
    std::string icache;
    auto* inter = app.add_subcommand("intersection", "exact psi-class intersection number");
    inter->add_option("genus", g, "genus")->required();
    inter->add_option("degrees", degrees, "psi exponents")->required();
    inter->add_option("--cache", icache, "cache file (default $GWV_CACHE)");

    int rg = -1, rk = -1;
    bool rcheck = false;
    unsigned states = 20;
    std::uint64_t rseed = 11;
    auto* rules = app.add_subcommand("rules", "print generated T-elimination rules");
    rules->add_option("--genus", rg, "only rules of this genus");
    rules->add_option("--arity", rk, "only rules of this arity");
    rules->add_flag("--check", rcheck, "check against printed forms and for numeric soundness");
    rules->add_option("--states", states, "random states for the soundness check")->check(CLI::PositiveNumber);
    rules->add_option("--seed", rseed, "seed for the soundness check");

    std::vector<const char*> argv{"gwverify"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*verify) {
            if (cfg.policy.t_lo <= 1 && cfg.policy.truncation < 0)
                throw UsageError("--t-lo <= 1 requires --truncation");
            if (cfg.policy.t_hi < cfg.policy.t_lo) throw UsageError("--t-hi must be at least --t-lo");
            return cmd_verify(cfg, out);
        }
        if (*normalize) return cmd_normalize(text, max_g0, max_g1, in, out);
        if (*inter) return cmd_intersection(g, degrees, icache, out);
        if (*rules) return cmd_rules(rg, rk, rcheck, states, rseed, out);
    } catch (const std::exception& e) {
        // bad names, bad expressions, corrupt cache files, arity overflow
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace gwv::cli
