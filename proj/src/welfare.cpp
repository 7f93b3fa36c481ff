#include "aptwelfare/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "aptwelfare/errors.hpp"

namespace aptw {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool money_leq(double a, double b) noexcept { return a <= b || same_money(a, b); }

void add_atom(std::vector<EvAtom>& atoms, double value, double mass) {
    if (!(mass > 0.0)) return;
    for (auto& a : atoms) {
        if (same_money(a.value, value)) {
            a.mass += mass;
            return;
        }
    }
    atoms.push_back({value, mass});
}

void sort_atoms(std::vector<EvAtom>& atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const EvAtom& a, const EvAtom& b) { return a.value < b.value; });
}

struct ChangeCells {
    std::size_t income_idx;
    std::size_t old_idx;
    std::size_t new_idx;
    double q_old;
    double q_new;
};

ChangeCells locate(const ChoiceDataset& ds, const PriceChange& pc) {
    pc.validate();
    auto j = ds.grid().income_index(pc.income);
    auto io = ds.grid().price_index(pc.p_old);
    auto in = ds.grid().price_index(pc.p_new);
    if (!j) throw CoverageError(fmt("income %g is not on the income grid", pc.income));
    if (!io || !in) throw CoverageError(fmt("prices %g and %g must both be grid prices", pc.p_old, pc.p_new));
    if (*in >= ds.grid().column_size(*j)) throw CoverageError("new price exceeds income");
    return {*j, *io, *in, ds.at(*io, *j), ds.at(*in, *j)};
}

}  // namespace

void PriceChange::validate() const {
    if (!(p_old >= 0.0 && p_old < p_new && p_new <= income))
        throw DomainError(fmt("price change needs 0 <= p_old < p_new <= income (got %g, %g, %g)", p_old, p_new, income));
}

double EVDistribution::total_mass() const noexcept {
    double m = continuous_mass;
    for (const auto& a : atoms) m += a.mass;
    if (interval) m += interval->mass;
    return m;
}

double EVDistribution::cdf(double z, Envelope env) const noexcept {
    if (z < 0.0 && !same_money(z, 0.0)) return 0.0;
    if (!cdf_samples.empty()) {
        if (money_leq(change.delta(), z)) return 1.0;
        double f = 0.0;
        for (const auto& s : cdf_samples) {
            if (!money_leq(s.z, z)) break;
            f = s.cdf;
        }
        return f;
    }
    double f = 0.0;
    for (const auto& a : atoms)
        if (money_leq(a.value, z)) f += a.mass;
    if (interval && money_leq(env == Envelope::Lower ? interval->lo : interval->hi, z)) f += interval->mass;
    return std::min(f, 1.0);
}

std::vector<double> EVDistribution::breakpoints() const {
    std::vector<double> z{0.0};
    for (const auto& a : atoms) z.push_back(a.value);
    if (interval) {
        z.push_back(interval->lo);
        z.push_back(interval->hi);
    }
    for (const auto& s : cdf_samples) z.push_back(s.z);
    z.push_back(change.delta());
    return z;
}

ReservationBound p10_bounds(const ChoiceDataset& ds, double y, double p_old, bool assume_full_attention,
                            const RunConfig& cfg) {
    if (ds.q1(p_old, y) <= cfg.eq_tol)
        throw NotApplicableError(fmt("q(%g, %g) = 0: the price increase has no welfare effect", p_old, y));
    ReservationBound b;
    b.p_bar = min_zero_price(ds, y, cfg.eq_tol);
    b.jump_at_p_bar = b.p_bar > ds.grid().prices().front() && jump_at(ds, y, b.p_bar, cfg.jump_threshold).is_jump;
    b.point_identified = assume_full_attention || b.jump_at_p_bar;
    b.p10_lo = b.p_bar;
    b.p10_hi = b.point_identified ? b.p_bar : ds.grid().incomes()[ds.require_income(y)];
    return b;
}

EVDistribution ev_distribution_apt(const ChoiceDataset& ds, const PriceChange& pc, bool assume_full_attention,
                                   const RunConfig& cfg) {
    const auto c = locate(ds, pc);
    EVDistribution d;
    d.model = EvModel::Apt;
    d.change = pc;
    if (c.q_old <= cfg.eq_tol) {
        d.not_applicable = true;
        d.atoms = {{0.0, 1.0}};
        return d;
    }
    if (c.q_new > c.q_old + cfg.eq_tol)
        throw DomainError(fmt("share rises from %g to %g between the old and new price", c.q_old, c.q_new));

    const auto bound = p10_bounds(ds, pc.income, pc.p_old, assume_full_attention, cfg);
    const double switchers = std::max(0.0, c.q_old - c.q_new);
    add_atom(d.atoms, 0.0, 1.0 - c.q_old);
    add_atom(d.atoms, pc.delta(), c.q_new);
    d.point_identified = bound.point_identified;
    if (bound.point_identified) {
        add_atom(d.atoms, bound.p_bar - pc.p_old, switchers);
    } else if (switchers > 0.0) {
        d.interval = EvInterval{bound.p_bar - pc.p_old, pc.income - pc.p_old, switchers};
    }
    sort_atoms(d.atoms);
    return d;
}

EVDistribution ev_distribution_rum(const ChoiceDataset& ds, const PriceChange& pc, const RunConfig& cfg) {
    const auto c = locate(ds, pc);
    const auto& ps = ds.grid().prices();
    EVDistribution d;
    d.model = EvModel::Rum;
    d.change = pc;
    for (std::size_t i = c.old_idx; i < c.new_idx; ++i) {
        const double q = ds.at(i, c.income_idx);
        if (i > c.old_idx && q > ds.at(i - 1, c.income_idx) + cfg.eq_tol)
            throw DomainError(fmt("share increases in price at %g (income %g)", ps[i], pc.income));
        d.cdf_samples.push_back({ps[i] - pc.p_old, std::clamp(1.0 - q, d.cdf_samples.empty() ? 0.0 : d.cdf_samples.back().cdf, 1.0)});
    }
    const double f0 = d.cdf_samples.front().cdf;
    const double f_last = d.cdf_samples.back().cdf;
    add_atom(d.atoms, 0.0, f0);
    add_atom(d.atoms, pc.delta(), 1.0 - f_last);
    d.continuous_mass = f_last - f0;
    d.not_applicable = c.q_old <= cfg.eq_tol;
    sort_atoms(d.atoms);
    return d;
}

FosdResult fosd_check(const EVDistribution& a, const EVDistribution& b, const std::vector<double>& extra_points,
                      const RunConfig& cfg) {
    const auto& x = a.change;
    const auto& y = b.change;
    if (!same_money(x.p_old, y.p_old) || !same_money(x.p_new, y.p_new) || !same_money(x.income, y.income))
        throw ProvenanceError("distributions describe different price changes");

    std::vector<double> pts = a.breakpoints();
    for (double z : b.breakpoints()) pts.push_back(z);
    for (double z : extra_points) pts.push_back(z);
    std::sort(pts.begin(), pts.end());
    std::vector<double> uniq;
    for (double z : pts)
        if (uniq.empty() || !same_money(uniq.back(), z)) uniq.push_back(z);

    FosdResult r;
    r.verdict = true;
    r.upper_verdict = true;
    r.max_gap = -1.0;
    for (double z : uniq) {
        const double fa = a.cdf(z, EVDistribution::Envelope::Lower);
        const double fa_hi = a.cdf(z, EVDistribution::Envelope::Upper);
        const double fb = b.cdf(z, EVDistribution::Envelope::Upper);
        if (fa > fb + cfg.eq_tol) r.verdict = false;
        if (fa_hi > fb + cfg.eq_tol) r.upper_verdict = false;
        if (fb - fa > r.max_gap + 1e-12) {
            r.max_gap = fb - fa;
            r.max_gap_at = z;
        }
    }
    r.grid = std::move(uniq);
    return r;
}

std::vector<double> price_offsets(const ChoiceDataset& ds, const PriceChange& pc) {
    const auto c = locate(ds, pc);
    std::vector<double> z;
    for (std::size_t i = c.old_idx; i < ds.grid().column_size(c.income_idx); ++i)
        z.push_back(ds.grid().prices()[i] - pc.p_old);
    return z;
}

}  // namespace aptw
