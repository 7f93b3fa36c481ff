#include "aptwelfare/rationalize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "aptwelfare/axioms.hpp"
#include "aptwelfare/errors.hpp"

namespace aptw {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

}  // namespace

PiecewiseLinear PiecewiseLinear::from_knots(std::vector<Knot> knots) {
    if (knots.empty()) throw DomainError("piecewise-linear function needs at least one knot");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i].x) || !std::isfinite(knots[i].y)) throw DomainError("non-finite knot");
        if (i > 0 && !(knots[i].x > knots[i - 1].x)) throw DomainError("knot abscissae must be strictly increasing");
    }
    PiecewiseLinear f;
    f.knots_ = std::move(knots);
    if (f.knots_.size() >= 2) {
        const auto& k = f.knots_;
        f.left_slope_ = (k[1].y - k[0].y) / (k[1].x - k[0].x);
        f.right_slope_ = (k.back().y - k[k.size() - 2].y) / (k.back().x - k[k.size() - 2].x);
    }
    return f;
}

PiecewiseLinear PiecewiseLinear::affine(double slope, double intercept) {
    PiecewiseLinear f;
    f.knots_ = {{0.0, intercept}};
    f.left_slope_ = slope;
    f.right_slope_ = slope;
    return f;
}

double PiecewiseLinear::operator()(double x) const noexcept {
    const auto& k = knots_;
    if (k.empty()) return 0.0;
    if (x <= k.front().x) return k.front().y + left_slope_ * (x - k.front().x);
    if (x >= k.back().x) return k.back().y + right_slope_ * (x - k.back().x);
    auto it = std::upper_bound(k.begin(), k.end(), x, [](double v, const Knot& kn) { return v < kn.x; });
    const Knot& hi = *it;
    const Knot& lo = *std::prev(it);
    if (lo.x == x) return lo.y;
    return lo.y + (hi.y - lo.y) * ((x - lo.x) / (hi.x - lo.x));
}

bool PiecewiseLinear::non_decreasing() const noexcept {
    if (left_slope_ < 0.0 || right_slope_ < 0.0) return false;
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (knots_[i].y < knots_[i - 1].y) return false;
    return true;
}

bool PiecewiseLinear::strictly_increasing() const noexcept {
    if (!(left_slope_ > 0.0) || !(right_slope_ > 0.0)) return false;
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i].y > knots_[i - 1].y)) return false;
    return true;
}

bool PiecewiseLinear::is_identity() const noexcept {
    return knots_.size() == 1 && left_slope_ == 1.0 && right_slope_ == 1.0 && knots_[0].y == knots_[0].x;
}

void UtilityPair::validate() const {
    if (!u0.non_decreasing()) throw DomainError("U0 must be non-decreasing");
    if (!u1.strictly_increasing()) throw DomainError("U1 must be strictly increasing");
}

AttentionCDF::AttentionCDF(std::vector<Knot> knots, Interp interp, bool tail_flag)
    : knots_(std::move(knots)), interp_(interp), tail_flag_(tail_flag) {
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const auto& k = knots_[i];
        if (!(k.t >= 0.0) || !std::isfinite(k.t)) throw DomainError("attention knot must be finite and >= 0");
        if (!(k.g >= 0.0 && k.g <= 1.0)) throw DomainError("attention CDF value outside [0,1]");
        if (i > 0 && (k.t < knots_[i - 1].t || k.g < knots_[i - 1].g))
            throw DomainError("attention CDF knots must be non-decreasing");
    }
    if ((*this)(0.0) != 0.0) throw DomainError("attention CDF must satisfy G(0) = 0");
    if (tail_flag_ && !knots_.empty() && knots_.back().g >= 1.0)
        throw DomainError("tail flag requires G < 1 at every finite knot");
}

AttentionCDF AttentionCDF::uniform(double a, double b, double tail_mass) {
    if (!(a >= 0.0) || !(b > a)) throw DomainError("uniform attention needs 0 <= a < b");
    if (!(tail_mass >= 0.0 && tail_mass < 1.0)) throw DomainError("tail mass must lie in [0, 1)");
    std::vector<Knot> k;
    k.push_back({0.0, 0.0});
    if (a > 0.0) k.push_back({a, 0.0});
    k.push_back({b, 1.0 - tail_mass});
    return AttentionCDF(std::move(k), Interp::Linear, tail_mass > 0.0);
}

AttentionCDF AttentionCDF::empirical(std::span<const double> thresholds) {
    if (thresholds.empty()) throw DomainError("empirical attention needs at least one threshold");
    std::vector<double> ts(thresholds.begin(), thresholds.end());
    std::sort(ts.begin(), ts.end());
    const double n = static_cast<double>(ts.size());
    std::vector<Knot> k{{0.0, 0.0}};
    std::size_t finite = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ts[i])) break;
        finite = i + 1;
        if (i + 1 < ts.size() && ts[i + 1] == ts[i]) continue;
        k.push_back({ts[i], static_cast<double>(i + 1) / n});
    }
    return AttentionCDF(std::move(k), Interp::Step, finite < ts.size());
}

double AttentionCDF::operator()(double t) const noexcept {
    if (knots_.empty() || t < knots_.front().t) return 0.0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t, [](double v, const Knot& k) { return v < k.t; });
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (i + 1 == knots_.size() || interp_ == Interp::Step) return knots_[i].g;
    const Knot& lo = knots_[i];
    const Knot& hi = knots_[i + 1];
    return lo.g + (hi.g - lo.g) * ((t - lo.t) / (hi.t - lo.t));
}

double AttentionCDF::quantile(double u) const noexcept {
    if (knots_.empty() || u > knots_.back().g) return std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(knots_.begin(), knots_.end(), u, [](const Knot& k, double v) { return k.g < v; });
    if (it == knots_.begin()) return it->t;
    const Knot& hi = *it;
    const Knot& lo = *std::prev(it);
    if (interp_ == Interp::Linear && hi.t > lo.t) return lo.t + (u - lo.g) / (hi.g - lo.g) * (hi.t - lo.t);
    return hi.t;
}

double apt_choice_prob(const UtilityPair& u, const AttentionCDF& g, double p, double y) noexcept {
    return u.u0(y) < u.u1(y - p) ? 1.0 - g(p) : 0.0;
}

PiecewiseLinear construct_u0(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& ys = ds.grid().incomes();
    std::vector<PiecewiseLinear::Knot> knots;
    knots.reserve(ys.size());
    for (double y : ys) {
        const double u = y - min_zero_price(ds, y, cfg.eq_tol);
        if (!knots.empty() && u < knots.back().y)
            throw ConstructionError(fmt("U0 decreases between incomes %g (U0 = %g) and %g (U0 = %g)", knots.back().x,
                                        knots.back().y, y, u));
        knots.push_back({y, u});
    }
    return PiecewiseLinear::from_knots(std::move(knots));
}

PiecewiseLinear construct_u1() { return PiecewiseLinear::identity(); }

AttentionCDF construct_g(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto& g = ds.grid();
    const auto& ps = g.prices();
    const auto n_inc = g.incomes().size();

    // Identified values, NaN where every income has q = 0.
    std::vector<double> ident(ps.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < n_inc; ++j) {
            if (g.column_size(j) <= i) continue;
            const double q = ds.at(i, j);
            if (q <= cfg.eq_tol) continue;
            if (std::isnan(ident[i])) {
                ident[i] = 1.0 - q;
            } else if (std::abs((1.0 - q) - ident[i]) > cfg.eq_tol) {
                throw ConstructionError(fmt("G is not well defined at price %g (shares %g and %g)", ps[i],
                                            1.0 - ident[i], q));
            }
        }
    }

    bool tail = false;
    for (double y : g.incomes()) {
        const double pbar = min_zero_price(ds, y, cfg.eq_tol);
        if (pbar > ps.front() && jump_at(ds, y, pbar, cfg.jump_threshold).is_jump) tail = true;
    }

    std::size_t last_ident = ps.size();
    for (std::size_t i = ps.size(); i-- > 0;) {
        if (!std::isnan(ident[i])) {
            last_ident = i;
            break;
        }
    }

    std::vector<AttentionCDF::Knot> knots;
    knots.reserve(ps.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        AttentionCDF::Knot k{ps[i], prev, false};
        if (!std::isnan(ident[i])) {
            // G(0) is pinned to 0. Data with 0 < q(0, y) < 1 violate Axiom E and
            // the mismatch surfaces in apt_rationalize's cell check.
            if (i == 0) {
                k.extended = std::abs(ident[i]) > cfg.eq_tol;
                knots.push_back(k);
                continue;
            }
            if (ident[i] < prev - cfg.eq_tol)
                throw ConstructionError(fmt("identified G decreases at price %g (%g < %g)", ps[i], ident[i], prev));
            k.g = std::max(ident[i], prev);
        } else {
            k.extended = true;
            const bool beyond = last_ident == ps.size() || i > last_ident;
            if (i == 0) {
                k.g = 0.0;
            } else if (beyond && !tail) {
                k.g = 1.0;
            }
        }
        prev = k.g;
        knots.push_back(k);
    }
    return AttentionCDF(std::move(knots), AttentionCDF::Interp::Step, tail);
}

AptRationalization apt_rationalize(const ChoiceDataset& ds, const RunConfig& cfg) {
    AptRationalization r;
    r.utility.u0 = construct_u0(ds, cfg);
    r.utility.u1 = construct_u1();
    r.attention = construct_g(ds, cfg);

    const auto& g = ds.grid();
    for (std::size_t j = 0; j < g.incomes().size(); ++j) {
        const double y = g.incomes()[j];
        for (std::size_t i = 0; i < g.column_size(j); ++i) {
            const double model = apt_choice_prob(r.utility, r.attention, g.prices()[i], y);
            if (std::abs(model - ds.at(i, j)) > cfg.eq_tol)
                throw ConstructionError(fmt("rationalization does not reproduce q(%g, %g): model %g, data %g",
                                            g.prices()[i], y, model, ds.at(i, j)));
        }
    }
    r.verified = true;
    return r;
}

namespace {

double quantile_on_curve(const std::vector<double>& prices, const std::vector<double>& curve, double nu,
                         double eq_tol) {
    for (std::size_t i = curve.size(); i-- > 0;)
        if (curve[i] >= nu - eq_tol) return prices[i];
    throw ConstructionError(fmt("no price with share >= %g (share at the lowest price is %g)", nu, curve.front()));
}

}  // namespace

double qrum_quantile(const ChoiceDataset& ds, double nu, const RunConfig& cfg) {
    if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    const auto curve = income_invariant_curve(ds, cfg.eq_tol);
    return quantile_on_curve(ds.grid().prices(), curve, nu, cfg.eq_tol);
}

QRUMPrimitives qrum_construct(const ChoiceDataset& ds, const RunConfig& cfg) {
    const auto curve = income_invariant_curve(ds, cfg.eq_tol);
    const auto& ps = ds.grid().prices();
    const std::size_t m = cfg.quantile_mesh;
    const double dm = static_cast<double>(m);

    QRUMPrimitives out;
    out.nu.resize(m + 1);
    out.f.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        out.nu[i] = static_cast<double>(i) / dm;
        out.f[i] = quantile_on_curve(ps, curve, out.nu[i], cfg.eq_tol);
    }
    out.v0.assign(m + 1, 0.0);
    out.v1 = out.f;
    out.beta.assign(m + 1, 1.0);

    std::vector<double> mid(m);
    for (std::size_t i = 0; i < m; ++i)
        mid[i] = quantile_on_curve(ps, curve, (static_cast<double>(i) + 0.5) / dm, cfg.eq_tol);
    std::sort(mid.begin(), mid.end());
    for (std::size_t k = 0; k < ps.size(); ++k) {
        // Share of mesh midpoints whose indifference price is >= p.
        auto it = std::lower_bound(mid.begin(), mid.end(), ps[k]);
        const double share = static_cast<double>(mid.end() - it) / dm;
        if (std::abs(share - curve[k]) > 2.0 / dm)
            throw ConstructionError(fmt("QRUM forward check fails at price %g: mesh share %g vs data %g", ps[k], share,
                                        curve[k]));
    }
    return out;
}

}  // namespace aptw
