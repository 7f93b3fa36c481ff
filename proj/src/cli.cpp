#include "aptwelfare/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "aptwelfare/axioms.hpp"
#include "aptwelfare/choice_data.hpp"
#include "aptwelfare/errors.hpp"
#include "aptwelfare/json_io.hpp"
#include "aptwelfare/rationalize.hpp"
#include "aptwelfare/simulate.hpp"
#include "aptwelfare/welfare.hpp"

namespace aptw::cli {

using nlohmann::json;

namespace {

constexpr const char* kGridNote =
    "finite-grid reading: 'for all prices' quantifiers range over grid prices; every income must be a grid price "
    "and every cell with price <= income must be observed";

struct Overrides {
    std::string config_path;
    std::optional<double> eq_tol;
    std::optional<double> jump_threshold;
    std::optional<double> continuity_modulus;
    std::optional<std::size_t> quantile_mesh;
    std::optional<double> bisection_tol;
    std::optional<std::uint64_t> seed;
    bool exact_grid = false;

    void attach(CLI::App* app, bool with_seed) {
        app->add_option("--config", config_path, "JSON file overriding default settings");
        app->add_option("--eq-tol", eq_tol, "probability equality tolerance");
        app->add_option("--jump-threshold", jump_threshold, "drop treated as a discontinuity");
        app->add_option("--continuity-modulus", continuity_modulus, "max share drop per unit price for B-QRUM");
        app->add_option("--quantile-mesh", quantile_mesh, "quantile mesh size for the QRUM construction");
        app->add_option("--bisection-tol", bisection_tol, "bisection tolerance in money units");
        app->add_flag("--exact-grid", exact_grid, "the grid is the full support of the data");
        if (with_seed) app->add_option("--seed", seed, "random seed");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw InputError("cannot open config " + config_path);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw InputError(std::string("config is not valid JSON: ") + e.what());
            }
            apply_config(j, cfg);
        }
        if (eq_tol) cfg.eq_tol = *eq_tol;
        if (jump_threshold) cfg.jump_threshold = *jump_threshold;
        if (continuity_modulus) cfg.continuity_modulus = *continuity_modulus;
        if (quantile_mesh) cfg.quantile_mesh = *quantile_mesh;
        if (bisection_tol) cfg.bisection_tol = *bisection_tol;
        if (seed) cfg.seed = *seed;
        if (exact_grid) cfg.exact_grid = true;
        cfg.validate();
        return cfg;
    }
};

json envelope(const char* command, const RunConfig& cfg) {
    return {{"schema", kSchema}, {"command", command}, {"config", to_json(cfg)}};
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw InputError(path + " is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------- check

struct CheckArgs {
    std::string csv;
    bool qrum = false;
    Overrides ov;
};

int run_check(const CheckArgs& a, std::ostream& out) {
    const RunConfig cfg = a.ov.resolve();
    const auto ds = load_csv(a.csv);
    auto reports = check_apt(ds, cfg);
    bool ok = all_passed(reports);
    json j = envelope("check", cfg);
    j["input"] = a.csv;
    j["apt_rationalizable"] = ok;
    j["reports"] = to_json(reports);
    j["notes"] = json::array({kGridNote});
    if (a.qrum) {
        try {
            auto q = check_qrum(ds, cfg);
            const bool qok = all_passed(q);
            j["qrum"] = {{"candidate", true}, {"qrum_rationalizable", qok}, {"reports", to_json(q)}};
            ok = ok && qok;
        } catch (const IncomeVarianceError& e) {
            j["qrum"] = {{"candidate", false},
                         {"qrum_rationalizable", false},
                         {"error", e.what()},
                         {"witness", {{"price", e.price}, {"income_a", e.income_a}, {"income_b", e.income_b}}}};
            ok = false;
        }
    }
    emit(out, j);
    return ok ? kExitOk : kExitVerdict;
}

// ---------------------------------------------------------------- rationalize

int run_rationalize(const CheckArgs& a, std::ostream& out) {
    const RunConfig cfg = a.ov.resolve();
    const auto ds = load_csv(a.csv);
    json j = envelope("rationalize", cfg);
    j["input"] = a.csv;
    if (a.qrum) {
        std::vector<AxiomReport> reports;
        try {
            reports = check_qrum(ds, cfg);
        } catch (const IncomeVarianceError& e) {
            j["qrum_rationalizable"] = false;
            j["error"] = e.what();
            emit(out, j);
            return kExitVerdict;
        }
        if (!all_passed(reports)) {
            j["qrum_rationalizable"] = false;
            j["reports"] = to_json(reports);
            emit(out, j);
            return kExitVerdict;
        }
        j["qrum_rationalizable"] = true;
        j["qrum"] = to_json(qrum_construct(ds, cfg));
        emit(out, j);
        return kExitOk;
    }
    const auto reports = check_apt(ds, cfg);
    if (!all_passed(reports)) {
        j["apt_rationalizable"] = false;
        j["reports"] = to_json(reports);
        emit(out, j);
        return kExitVerdict;
    }
    j["apt_rationalizable"] = true;
    const json built = to_json(apt_rationalize(ds, cfg));
    for (const auto& [k, v] : built.items()) j[k] = v;
    j["notes"] = json::array({"G is one member of the identified set: knots marked extended are not identified"});
    emit(out, j);
    return kExitOk;
}

// ---------------------------------------------------------------- welfare

struct WelfareArgs {
    std::string csv;
    double y = 0.0;
    double p_old = 0.0;
    double p_new = 0.0;
    bool full_attention = false;
    std::string model = "both";
    std::string emit_cdf;
    Overrides ov;
};

void write_cdf_csv(const std::string& path, const std::vector<double>& zs, const EVDistribution* apt,
                   const EVDistribution* rum) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    f << "z,F_apt_lo,F_apt_hi,F_rum\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (double z : zs) {
        f << num(z) << ',';
        if (apt) f << num(apt->cdf(z, EVDistribution::Envelope::Lower)) << ',' << num(apt->cdf(z, EVDistribution::Envelope::Upper));
        else f << ',';
        f << ',';
        if (rum) f << num(rum->cdf(z));
        f << '\n';
    }
}

int run_welfare(const WelfareArgs& a, std::ostream& out) {
    const RunConfig cfg = a.ov.resolve();
    const auto ds = load_csv(a.csv);
    const PriceChange pc{a.p_old, a.p_new, a.y};
    json j = envelope("welfare", cfg);
    j["input"] = a.csv;
    j["assume_full_attention"] = a.full_attention;

    std::optional<EVDistribution> apt, rum;
    if (a.model == "apt" || a.model == "both") {
        apt = ev_distribution_apt(ds, pc, a.full_attention, cfg);
        j["apt"] = to_json(*apt);
        if (!apt->not_applicable) j["apt"]["reservation"] = to_json(p10_bounds(ds, a.y, a.p_old, a.full_attention, cfg));
    }
    if (a.model == "rum" || a.model == "both") {
        rum = ev_distribution_rum(ds, pc, cfg);
        j["rum"] = to_json(*rum);
    }
    int code = kExitOk;
    const auto offsets = price_offsets(ds, pc);
    std::vector<double> zs = offsets;
    if (apt && rum) {
        const auto f = fosd_check(*apt, *rum, offsets, cfg);
        j["fosd"] = to_json(f);
        zs = f.grid;
        if (!f.verdict) code = kExitVerdict;
    }
    if (!a.emit_cdf.empty()) {
        write_cdf_csv(a.emit_cdf, zs, apt ? &*apt : nullptr, rum ? &*rum : nullptr);
        j["cdf_csv"] = a.emit_cdf;
    }
    emit(out, j);
    return code;
}

// ---------------------------------------------------------------- simulate / oracle

struct SimulateArgs {
    std::string spec;
    double grid_step = 0.01;
    std::string out_path;
    bool inject = false;
    Overrides ov;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
    const RunConfig cfg = a.ov.resolve();
    auto spec = population_from_json(read_json_file(a.spec));
    if (a.ov.seed) spec.population.seed = cfg.seed;
    const auto grid = PriceGrid::uniform(a.grid_step, spec.incomes);
    const auto ds = forward_choice_prob(spec.population, grid, a.inject, cfg);
    save_csv(ds, a.out_path);
    std::size_t rows = 0;
    for (std::size_t j = 0; j < ds.grid().incomes().size(); ++j) rows += ds.grid().column_size(j);
    json j = envelope("simulate", cfg);
    j["out"] = a.out_path;
    j["rows"] = rows;
    j["prices"] = ds.grid().prices().size();
    j["incomes"] = ds.grid().incomes();
    j["seed"] = spec.population.seed;
    j["inject_breakpoints"] = a.inject;
    emit(out, j);
    return kExitOk;
}

struct OracleArgs {
    std::string spec;
    double y = 0.0;
    double p_old = 0.0;
    double p_new = 0.0;
    std::size_t n = 100000;
    Overrides ov;
};

int run_oracle(const OracleArgs& a, std::ostream& out) {
    const RunConfig cfg = a.ov.resolve();
    auto spec = population_from_json(read_json_file(a.spec));
    spec.population.seed = a.ov.seed ? cfg.seed : (spec.population.seed ? spec.population.seed : cfg.seed);
    const PriceChange pc{a.p_old, a.p_new, a.y};
    const auto e = monte_carlo_ev(spec.population, pc, a.n, cfg);
    json j = envelope("oracle", cfg);
    j["p_old"] = a.p_old;
    j["p_new"] = a.p_new;
    j["income"] = a.y;
    if (auto p10 = reservation_price(spec.population.utility, a.y, cfg)) j["p10"] = *p10;
    const json ej = to_json(e);
    for (const auto& [k, v] : ej.items()) j[k] = v;
    emit(out, j);
    return kExitOk;
}

// ---------------------------------------------------------------- example

struct ExampleArgs {
    bool full_attention = false;
    double grid_step = 0.01;
    bool table = false;
    Overrides ov;
};

struct Comparison {
    std::string quantity;
    double expected;
    double observed;
    bool ok;
};

int run_example(const ExampleArgs& a, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = a.ov.resolve();
    constexpr double k = 3.0, y = 10.0, p_old = 1.0, p_new = 2.0, tol = 1e-6;
    const auto grid = PriceGrid::uniform(a.grid_step, {y});
    const auto ds = ChoiceDataset::from_function(grid, [&](double p, double) { return p <= k ? 1.0 - p / k : 0.0; });
    const PriceChange pc{p_old, p_new, y};

    std::vector<Comparison> cmp;
    auto expect = [&](std::string what, double expected, double observed) {
        cmp.push_back({std::move(what), expected, observed, std::abs(expected - observed) <= tol});
    };

    const auto apt_reports = check_apt(ds, cfg);
    const auto qrum_reports = check_qrum(ds, cfg);
    expect("check_apt passes", 1.0, all_passed(apt_reports) ? 1.0 : 0.0);
    expect("check_qrum passes", 1.0, all_passed(qrum_reports) ? 1.0 : 0.0);
    expect("p_bar", k, min_zero_price(ds, y, cfg.eq_tol));

    const auto rum = ev_distribution_rum(ds, pc, cfg);
    double rum_dev = 0.0;
    for (const auto& s : rum.cdf_samples) rum_dev = std::max(rum_dev, std::abs(rum.cdf(s.z) - (1.0 + s.z) / 3.0));
    expect("max |F_rum - (1+z)/3|", 0.0, rum_dev);
    expect("F_rum(0)", 1.0 / 3.0, rum.cdf(0.0));
    expect("F_rum(1)", 1.0, rum.cdf(1.0));

    const auto apt = ev_distribution_apt(ds, pc, a.full_attention, cfg);
    auto mass_at = [&](double v) {
        double m = 0.0;
        for (const auto& at : apt.atoms)
            if (std::abs(at.value - v) <= tol) m += at.mass;
        return m;
    };
    expect("APT mass at EV 0", 1.0 / 3.0, mass_at(0.0));
    expect("APT mass at EV 1", 1.0 / 3.0, mass_at(1.0));
    if (apt.point_identified) {
        expect("APT mass at EV 2", 1.0 / 3.0, mass_at(k - p_old));
    } else {
        expect("APT interval lo", k - p_old, apt.interval ? apt.interval->lo : NAN);
        expect("APT interval hi", y - p_old, apt.interval ? apt.interval->hi : NAN);
        expect("APT interval mass", 1.0 / 3.0, apt.interval ? apt.interval->mass : NAN);
    }
    expect("APT total mass", 1.0, apt.total_mass());
    const auto fosd = fosd_check(apt, rum, price_offsets(ds, pc), cfg);
    expect("F_apt(0.5)", 1.0 / 3.0, apt.cdf(0.5));
    expect("F_rum(0.5)", 0.5, rum.cdf(0.5));
    expect("FOSD verdict", 1.0, fosd.verdict ? 1.0 : 0.0);

    bool all_ok = true;
    for (const auto& c : cmp) {
        if (!c.ok && all_ok) err << "mismatch: " << c.quantity << " expected " << c.expected << " got " << c.observed << '\n';
        all_ok = all_ok && c.ok;
    }

    if (a.table) {
        char line[160];
        std::snprintf(line, sizeof line, "%-24s %14s %14s  %s\n", "quantity", "expected", "observed", "ok");
        out << line;
        for (const auto& c : cmp) {
            std::snprintf(line, sizeof line, "%-24s %14.9f %14.9f  %s\n", c.quantity.c_str(), c.expected, c.observed,
                          c.ok ? "yes" : "NO");
            out << line;
        }
        out << (apt.point_identified ? "identification: point\n" : "identification: partial\n");
        return all_ok ? kExitOk : kExitVerdict;
    }

    json j = envelope("example", cfg);
    j["k"] = k;
    j["income"] = y;
    j["p_old"] = p_old;
    j["p_new"] = p_new;
    j["grid_step"] = a.grid_step;
    j["assume_full_attention"] = a.full_attention;
    j["identification"] = apt.point_identified ? "point" : "partial";
    json rows = json::array();
    for (const auto& c : cmp) rows.push_back({{"quantity", c.quantity}, {"expected", c.expected}, {"observed", c.observed}, {"ok", c.ok}});
    j["comparisons"] = rows;
    j["apt"] = to_json(apt);
    j["rum"] = to_json(rum);
    j["fosd"] = to_json(fosd);
    j["all_ok"] = all_ok;
    emit(out, j);
    return all_ok ? kExitOk : kExitVerdict;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attention-price threshold choice analysis: axiom checks, rationalization, welfare identification",
                 "aptwelfare"};
    app.require_subcommand(1, 1);

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "test the APT axioms (and optionally the QRUM axioms)");
    check->add_option("csv", check_args.csv, "choice data CSV (price,income,share)")->required();
    check->add_flag("--qrum", check_args.qrum, "also run the QRUM axioms");
    check_args.ov.attach(check, false);

    CheckArgs rat_args;
    auto* rat = app.add_subcommand("rationalize", "construct rationalizing primitives");
    rat->add_option("csv", rat_args.csv, "choice data CSV")->required();
    rat->add_flag("--qrum", rat_args.qrum, "construct the QRUM primitives instead");
    rat_args.ov.attach(rat, false);

    WelfareArgs w;
    auto* welfare = app.add_subcommand("welfare", "identify the EV distribution of a price increase");
    welfare->add_option("csv", w.csv, "choice data CSV")->required();
    welfare->add_option("--y", w.y, "income")->required();
    welfare->add_option("--p-old", w.p_old, "initial price")->required();
    welfare->add_option("--p-new", w.p_new, "new price")->required();
    welfare->add_flag("--assume-full-attention", w.full_attention, "impose positive mass of fully attentive consumers");
    welfare->add_option("--model", w.model, "apt, rum or both")->check(CLI::IsMember({"apt", "rum", "both"}));
    welfare->add_option("--emit-cdf", w.emit_cdf, "write z,F_apt_lo,F_apt_hi,F_rum CSV");
    w.ov.attach(welfare, false);

    SimulateArgs s;
    auto* sim = app.add_subcommand("simulate", "forward-simulate choice data from a population spec");
    sim->add_option("--spec", s.spec, "population spec JSON")->required();
    sim->add_option("--grid-step", s.grid_step, "price grid step")->check(CLI::PositiveNumber);
    sim->add_option("--out", s.out_path, "output CSV")->required();
    sim->add_flag("--inject-breakpoints", s.inject, "add p10 and attention knots to the price grid");
    s.ov.attach(sim, true);

    OracleArgs o;
    auto* oracle = app.add_subcommand("oracle", "consumer-level Monte Carlo EV oracle");
    oracle->add_option("--spec", o.spec, "population spec JSON (kind apt)")->required();
    oracle->add_option("--y", o.y, "income")->required();
    oracle->add_option("--p-old", o.p_old, "initial price")->required();
    oracle->add_option("--p-new", o.p_new, "new price")->required();
    oracle->add_option("--n", o.n, "number of simulated consumers")->check(CLI::PositiveNumber);
    o.ov.attach(oracle, true);

    ExampleArgs ex;
    auto* example = app.add_subcommand("example", "reproduce the k = 3 worked example end to end");
    example->add_flag("--assume-full-attention", ex.full_attention, "impose positive mass of fully attentive consumers");
    example->add_option("--grid-step", ex.grid_step, "price grid step")->check(CLI::PositiveNumber);
    example->add_flag("--table", ex.table, "print a text table instead of JSON");
    ex.ov.attach(example, false);

    std::vector<std::string> argv_store{"aptwelfare"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (check->parsed()) return run_check(check_args, out);
        if (rat->parsed()) return run_rationalize(rat_args, out);
        if (welfare->parsed()) return run_welfare(w, out);
        if (sim->parsed()) return run_simulate(s, out);
        if (oracle->parsed()) return run_oracle(o, out);
        if (example->parsed()) return run_example(ex, out, err);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        err << "analysis error: " << e.what() << '\n';
        json j{{"schema", kSchema}, {"error", e.what()}};
        emit(out, j);
        return kExitVerdict;
    }
    return kExitInput;
}

}  // namespace aptw::cli
