#include "aptwelfare/json_io.hpp"

#include <cmath>
#include <limits>

#include "aptwelfare/errors.hpp"

namespace aptw {

using nlohmann::json;

namespace {

double number_or_inf(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_null() || (v.is_string() && (v == "inf" || v == "+inf" || v == "Infinity")))
        return std::numeric_limits<double>::infinity();
    throw InputError("expected a number or \"inf\"");
}

std::vector<std::pair<double, double>> pairs(const json& arr, const char* what) {
    if (!arr.is_array()) throw InputError(std::string(what) + " must be an array of [x, y] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw InputError(std::string(what) + " entries must be [x, y] number pairs");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

}  // namespace

json to_json(const AxiomReport& r) {
    json w = json::array();
    for (const auto& wit : r.witnesses) {
        json cells = json::array();
        for (const auto& c : wit.cells) cells.push_back({{"price", c.price}, {"income", c.income}, {"value", c.value}});
        w.push_back({{"cells", cells}, {"detail", wit.detail}});
    }
    json j{{"axiom", std::string(to_string(r.axiom))}, {"verdict", std::string(to_string(r.verdict))}, {"witnesses", w}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json to_json(const std::vector<AxiomReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

json to_json(const EVDistribution& d) {
    json atoms = json::array();
    for (const auto& a : d.atoms) atoms.push_back({{"value", a.value}, {"mass", a.mass}});
    json j{{"model", d.model == EvModel::Apt ? "apt" : "rum"},
           {"p_old", d.change.p_old},
           {"p_new", d.change.p_new},
           {"income", d.change.income},
           {"atoms", atoms},
           {"total_mass", d.total_mass()}};
    if (d.model == EvModel::Apt) {
        j["point_identified"] = d.point_identified;
        j["interval"] = d.interval ? json{{"lo", d.interval->lo}, {"hi", d.interval->hi}, {"mass", d.interval->mass}}
                                   : json(nullptr);
    } else {
        json seg = json::array();
        for (const auto& s : d.cdf_samples) seg.push_back({{"z", s.z}, {"cdf", s.cdf}});
        j["cdf_segments"] = seg;
        j["continuous_mass"] = d.continuous_mass;
    }
    if (d.not_applicable) j["not_applicable"] = true;
    return j;
}

json to_json(const ReservationBound& b) {
    return {{"p_bar", b.p_bar},
            {"p10_lo", b.p10_lo},
            {"p10_hi", b.p10_hi},
            {"point_identified", b.point_identified},
            {"jump_at_p_bar", b.jump_at_p_bar}};
}

json to_json(const FosdResult& f) {
    return {{"verdict", f.verdict},
            {"upper_envelope_verdict", f.upper_verdict},
            {"max_gap_at", f.max_gap_at},
            {"max_gap", f.max_gap}};
}

json to_json(const AptRationalization& r) {
    json u0 = json::array();
    for (const auto& k : r.utility.u0.knots()) u0.push_back({k.x, k.y});
    json g = json::array();
    for (const auto& k : r.attention.knots()) g.push_back({{"t", k.t}, {"g", k.g}, {"extended", k.extended}});
    json u1 = r.utility.u1.is_identity() ? json("identity") : json(nullptr);
    return {{"u0", u0},
            {"u1", u1},
            {"g", g},
            {"tail_flag", r.attention.tail_flag()},
            {"tail_mass", r.attention.tail_mass()},
            {"verified", r.verified}};
}

json to_json(const QRUMPrimitives& q) {
    json f = json::array();
    for (std::size_t i = 0; i < q.nu.size(); ++i) f.push_back({q.nu[i], q.f[i]});
    return {{"f", f}, {"beta", 1}, {"v0", 0}, {"v1", "f"}};
}

json to_json(const EmpiricalEV& e) {
    json atoms = json::array();
    for (const auto& a : e.atoms) atoms.push_back({{"value", a.value}, {"mass", a.mass}});
    return {{"atoms", atoms},
            {"n", e.n},
            {"seed", e.seed},
            {"classes", {{"full", e.full}, {"partial", e.partial}, {"none", e.none}}},
            {"exact_boundary", e.exact_boundary}};
}

json to_json(const RunConfig& c) {
    return {{"eq_tol", c.eq_tol},
            {"jump_threshold", c.jump_threshold},
            {"continuity_modulus", c.continuity_modulus},
            {"quantile_mesh", c.quantile_mesh},
            {"bisection_tol", c.bisection_tol},
            {"bisection_max_iter", c.bisection_max_iter},
            {"seed", c.seed},
            {"exact_grid", c.exact_grid}};
}

void apply_config(const json& j, RunConfig& cfg) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& k = it.key();
            const auto& v = it.value();
            if (k == "eq_tol") cfg.eq_tol = v.get<double>();
            else if (k == "jump_threshold") cfg.jump_threshold = v.get<double>();
            else if (k == "continuity_modulus") cfg.continuity_modulus = v.get<double>();
            else if (k == "quantile_mesh") cfg.quantile_mesh = v.get<std::size_t>();
            else if (k == "bisection_tol") cfg.bisection_tol = v.get<double>();
            else if (k == "bisection_max_iter") cfg.bisection_max_iter = v.get<int>();
            else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (k == "exact_grid") cfg.exact_grid = v.get<bool>();
            else if (k == "schema") continue;
            else throw InputError("unknown config key '" + k + "'");
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("bad config value: ") + e.what());
    }
}

PopulationSpec population_from_json(const json& j) {
    if (!j.is_object()) throw InputError("population spec must be a JSON object");
    PopulationSpec spec;
    try {
        if (!j.contains("incomes")) throw InputError("population spec needs \"incomes\"");
        spec.incomes = j.at("incomes").get<std::vector<double>>();
        const std::string kind = j.value("kind", std::string("apt"));
        const auto seed = j.value("seed", std::uint64_t{0});

        if (kind == "qrum") {
            if (j.contains("eta_uniform")) {
                auto ab = j.at("eta_uniform").get<std::vector<double>>();
                if (ab.size() != 2 || !(ab[1] > ab[0])) throw InputError("eta_uniform must be [a, b] with a < b");
                spec.population = Population::qrum(PiecewiseLinear::from_knots({{0.0, ab[1]}, {1.0, ab[0]}}), seed);
            } else if (j.contains("f_knots")) {
                std::vector<PiecewiseLinear::Knot> k;
                for (auto [x, y] : pairs(j.at("f_knots"), "f_knots")) k.push_back({x, y});
                spec.population = Population::qrum(PiecewiseLinear::from_knots(std::move(k)), seed);
            } else {
                throw InputError("qrum spec needs \"eta_uniform\" or \"f_knots\"");
            }
            return spec;
        }
        if (kind != "apt") throw InputError("kind must be \"apt\" or \"qrum\"");

        UtilityPair u;
        const auto& u0 = j.contains("u0_knots") ? j.at("u0_knots") : json("linear");
        if (u0.is_string() && u0 == "linear") {
            u.u0 = PiecewiseLinear::identity();
        } else {
            std::vector<PiecewiseLinear::Knot> k;
            for (auto [x, y] : pairs(u0, "u0_knots")) k.push_back({x, y});
            u.u0 = PiecewiseLinear::from_knots(std::move(k));
        }
        u.u1 = PiecewiseLinear::affine(1.0, j.value("u1_offset", 0.0));

        const double tail = j.value("tail_mass", 0.0);
        if (!j.contains("g")) throw InputError("apt spec needs \"g\"");
        const auto& g = j.at("g");
        if (g.contains("thresholds")) {
            std::vector<double> ts;
            for (const auto& t : g.at("thresholds")) ts.push_back(number_or_inf(t));
            spec.population = Population::apt(std::move(u), std::move(ts), seed);
        } else if (g.contains("uniform")) {
            auto ab = g.at("uniform").get<std::vector<double>>();
            if (ab.size() != 2) throw InputError("uniform must be [a, b]");
            spec.population = Population::apt(std::move(u), AttentionCDF::uniform(ab[0], ab[1], tail), seed);
        } else if (g.contains("knots")) {
            std::vector<AttentionCDF::Knot> k;
            for (auto [t, v] : pairs(g.at("knots"), "g.knots")) k.push_back({t, v, false});
            const auto interp = g.value("interp", std::string("linear")) == "step" ? AttentionCDF::Interp::Step
                                                                                  : AttentionCDF::Interp::Linear;
            const bool has_tail = !k.empty() && k.back().g < 1.0;
            spec.population = Population::apt(std::move(u), AttentionCDF(std::move(k), interp, has_tail), seed);
        } else {
            throw InputError("g must contain \"uniform\", \"knots\" or \"thresholds\"");
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("bad population spec: ") + e.what());
    }
    return spec;
}

}  // namespace aptw
