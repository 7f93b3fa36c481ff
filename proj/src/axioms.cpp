#include "aptwelfare/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "aptwelfare/errors.hpp"

namespace aptw {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

AxiomReport finish(AxiomId id, std::vector<Witness> w, Verdict bad = Verdict::Fail) {
    AxiomReport r;
    r.axiom = id;
    r.verdict = w.empty() ? Verdict::Pass : bad;
    r.witnesses = std::move(w);
    return r;
}

Cell cell(const ChoiceDataset& ds, std::size_t i, std::size_t j) {
    return {ds.grid().prices()[i], ds.grid().incomes()[j], ds.at(i, j)};
}

// Smallest income whose column contains price index i.
std::size_t first_income_with(const PriceGrid& g, std::size_t i) {
    for (std::size_t j = 0; j < g.incomes().size(); ++j)
        if (g.column_size(j) > i) return j;
    return g.incomes().size() - 1;
}

bool lookup(const ChoiceDataset& ds, const Cell& c, double& out) {
    try {
        out = ds.q1(c.price, c.income);
        return true;
    } catch (const LookupError&) {
        return false;
    }
}

}  // namespace

std::string_view to_string(AxiomId id) noexcept {
    switch (id) {
        case AxiomId::A_i: return "A_i";
        case AxiomId::A_ii: return "A_ii";
        case AxiomId::B: return "B";
        case AxiomId::C: return "C";
        case AxiomId::D: return "D";
        case AxiomId::E: return "E";
        case AxiomId::A_QRUM: return "A_QRUM";
        case AxiomId::B_QRUM: return "B_QRUM";
        case AxiomId::C_QRUM: return "C_QRUM";
    }
    return "?";
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Warn: return "warn";
        case Verdict::Fail: return "fail";
    }
    return "?";
}

AxiomReport check_axiom_a_i(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    const auto& ys = g.incomes();
    std::vector<Witness> out;
    for (std::size_t j = 0; j < ys.size(); ++j) {
        for (std::size_t k = j + 1; k < ys.size(); ++k) {
            const double eps = ys[k] - ys[j];
            for (std::size_t i = 0; i < g.column_size(j); ++i) {
                auto shifted = g.price_index(g.prices()[i] + eps);
                if (!shifted || *shifted >= g.column_size(k)) continue;
                if (ds.at(*shifted, k) > ds.at(i, j) + cfg.eq_tol) {
                    out.push_back({{cell(ds, i, j), cell(ds, *shifted, k)},
                                   fmt("q rises along the diagonal (shift %g)", eps)});
                }
            }
        }
    }
    return finish(AxiomId::A_i, std::move(out));
}

AxiomReport check_axiom_a_ii(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    std::vector<Witness> out;
    for (std::size_t j = 0; j < g.incomes().size(); ++j) {
        for (std::size_t i = 1; i < g.column_size(j); ++i) {
            if (ds.at(i, j) > ds.at(i - 1, j) + cfg.eq_tol)
                out.push_back({{cell(ds, i - 1, j), cell(ds, i, j)}, "q increases in price"});
        }
    }
    return finish(AxiomId::A_ii, std::move(out));
}

std::vector<AxiomReport> check_axiom_a(const ChoiceDataset& ds, const RunConfig& cfg) {
    return {check_axiom_a_i(ds, cfg), check_axiom_a_ii(ds, cfg)};
}

AxiomReport check_axiom_b(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    const auto n_inc = g.incomes().size();
    std::vector<Witness> out;
    for (std::size_t i = 0; i < g.prices().size(); ++i) {
        for (std::size_t j = 0; j < n_inc; ++j) {
            if (g.column_size(j) <= i || ds.at(i, j) <= cfg.eq_tol) continue;
            for (std::size_t k = j + 1; k < n_inc; ++k) {
                if (g.column_size(k) <= i || ds.at(i, k) <= cfg.eq_tol) continue;
                if (std::abs(ds.at(i, j) - ds.at(i, k)) > cfg.eq_tol)
                    out.push_back({{cell(ds, i, j), cell(ds, i, k)}, "unequal positive shares at the same price"});
            }
        }
    }
    return finish(AxiomId::B, std::move(out));
}

AxiomReport check_axiom_c(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    std::vector<Witness> out;
    for (std::size_t j = 0; j < g.incomes().size(); ++j) {
        auto col = ds.column(j);
        const bool any_zero = std::any_of(col.begin(), col.end(), [&](double v) { return v <= cfg.eq_tol; });
        if (!any_zero)
            out.push_back({{cell(ds, col.size() - 1, j)}, "no grid price with zero share at this income"});
    }
    return finish(AxiomId::C, std::move(out));
}

AxiomReport check_axiom_d(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    std::vector<Witness> out;
    for (std::size_t j = 0; j < g.incomes().size(); ++j) {
        auto col = ds.column(j);
        std::size_t n = col.size();
        std::size_t last_pos = n;
        for (std::size_t i = n; i-- > 0;) {
            if (col[i] > cfg.eq_tol) {
                last_pos = i;
                break;
            }
        }
        if (last_pos == n || last_pos + 1 == n) continue;  // all zero, or no strict upper tail
        const double drop = col[last_pos] - col[last_pos + 1];
        if (drop >= cfg.jump_threshold)
            out.push_back({{cell(ds, last_pos, j), cell(ds, last_pos + 1, j)},
                           fmt("positive share %.6g directly before the zero tail (drop %.6g >= %.6g)",
                               col[last_pos], drop, cfg.jump_threshold)});
    }
    auto r = finish(AxiomId::D, std::move(out), cfg.exact_grid ? Verdict::Fail : Verdict::Warn);
    r.note = cfg.exact_grid ? "exact grid: a jump into the zero tail is a violation"
                            : "finite grid: a jump into the zero tail is a warning";
    return r;
}

AxiomReport check_axiom_e(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    std::vector<Witness> out;
    for (std::size_t j = 0; j < g.incomes().size(); ++j) {
        const double v = ds.at(0, j);
        if (std::abs(v) > cfg.eq_tol && std::abs(v - 1.0) > cfg.eq_tol)
            out.push_back({{cell(ds, 0, j)}, "share at zero price is neither 0 nor 1"});
    }
    return finish(AxiomId::E, std::move(out));
}

std::vector<AxiomReport> check_apt(const ChoiceDataset& ds, const RunConfig& cfg) {
    return {check_axiom_a_i(ds, cfg), check_axiom_a_ii(ds, cfg), check_axiom_b(ds, cfg),
            check_axiom_c(ds, cfg),   check_axiom_d(ds, cfg),    check_axiom_e(ds, cfg)};
}

bool all_passed(const std::vector<AxiomReport>& reports) noexcept {
    return std::all_of(reports.begin(), reports.end(), [](const AxiomReport& r) { return r.passed(); });
}

std::vector<double> income_invariant_curve(const ChoiceDataset& ds, double eq_tol) {
    const auto& g = ds.grid();
    std::vector<double> curve(g.prices().size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const std::size_t j0 = first_income_with(g, i);
        curve[i] = ds.at(i, j0);
        for (std::size_t k = j0 + 1; k < g.incomes().size(); ++k) {
            if (std::abs(ds.at(i, k) - curve[i]) > eq_tol)
                throw IncomeVarianceError(fmt("share at price %g differs between incomes %g and %g", g.prices()[i],
                                              g.incomes()[j0], g.incomes()[k]),
                                          g.prices()[i], g.incomes()[j0], g.incomes()[k]);
        }
    }
    return curve;
}

std::vector<AxiomReport> check_qrum(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    const auto& ps = g.prices();
    const auto curve = income_invariant_curve(ds, cfg.eq_tol);
    auto at = [&](std::size_t i) {
        const std::size_t j = first_income_with(g, i);
        return Cell{ps[i], g.incomes()[j], curve[i]};
    };

    std::vector<Witness> a, b, c;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i] > curve[i - 1] + cfg.eq_tol) a.push_back({{at(i - 1), at(i)}, "q increases in price"});
        const double bound = cfg.continuity_modulus * (ps[i] - ps[i - 1]);
        if (curve[i - 1] - curve[i] > bound + cfg.eq_tol)
            b.push_back({{at(i - 1), at(i)}, fmt("drop %.6g exceeds modulus bound %.6g", curve[i - 1] - curve[i], bound)});
    }
    if (std::abs(curve.front() - 1.0) > cfg.eq_tol) c.push_back({{at(0)}, "share at the lowest price is not 1"});
    for (std::size_t j = 0; j < g.incomes().size(); ++j) {
        const std::size_t top = g.column_size(j) - 1;
        if (ds.at(top, j) > cfg.eq_tol) c.push_back({{cell(ds, top, j)}, "share at price = income is not 0"});
    }

    auto rb = finish(AxiomId::B_QRUM, std::move(b));
    rb.note = fmt("continuity modulus %g per unit price", cfg.continuity_modulus);
    return {finish(AxiomId::A_QRUM, std::move(a)), std::move(rb), finish(AxiomId::C_QRUM, std::move(c))};
}

bool witness_replays(const ChoiceDataset& ds, AxiomId axiom, const Witness& w, const RunConfig& cfg) {
    std::vector<double> v(w.cells.size());
    for (std::size_t k = 0; k < w.cells.size(); ++k)
        if (!lookup(ds, w.cells[k], v[k])) return false;
    const auto& c = w.cells;
    switch (axiom) {
        case AxiomId::A_i:
            return c.size() == 2 && c[1].income > c[0].income &&
                   same_money(c[1].price - c[0].price, c[1].income - c[0].income) && v[1] > v[0] + cfg.eq_tol;
        case AxiomId::A_ii:
        case AxiomId::A_QRUM:
            return c.size() == 2 && c[1].price > c[0].price && v[1] > v[0] + cfg.eq_tol;
        case AxiomId::B:
            return c.size() == 2 && same_money(c[0].price, c[1].price) && v[0] > cfg.eq_tol && v[1] > cfg.eq_tol &&
                   std::abs(v[0] - v[1]) > cfg.eq_tol;
        case AxiomId::C: {
            if (c.size() != 1) return false;
            auto col = ds.column(ds.require_income(c[0].income));
            return std::none_of(col.begin(), col.end(), [&](double q) { return q <= cfg.eq_tol; });
        }
        case AxiomId::D: {
            if (c.size() != 2 || v[0] <= cfg.eq_tol) return false;
            const std::size_t j = ds.require_income(c[0].income);
            const std::size_t i = ds.require_price(c[0].price);
            auto col = ds.column(j);
            for (std::size_t k = i + 1; k < col.size(); ++k)
                if (col[k] > cfg.eq_tol) return false;
            return i + 1 < col.size() && col[i] - col[i + 1] >= cfg.jump_threshold;
        }
        case AxiomId::E:
            return c.size() == 1 && c[0].price == 0.0 && std::abs(v[0]) > cfg.eq_tol &&
                   std::abs(v[0] - 1.0) > cfg.eq_tol;
        case AxiomId::B_QRUM:
            return c.size() == 2 && c[1].price > c[0].price &&
                   v[0] - v[1] > cfg.continuity_modulus * (c[1].price - c[0].price) + cfg.eq_tol;
        case AxiomId::C_QRUM:
            if (c.size() != 1) return false;
            if (c[0].price == 0.0 && std::abs(v[0] - 1.0) > cfg.eq_tol) return true;
            return same_money(c[0].price, c[0].income) && v[0] > cfg.eq_tol;
    }
    return false;
}

}  // namespace aptw
