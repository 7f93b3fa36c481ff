#include "aptwelfare/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <string>
#include <thread>

#include "aptwelfare/errors.hpp"

namespace aptw {

namespace {

constexpr std::size_t kChunk = 4096;

std::uint64_t splitmix(std::uint64_t& s) noexcept {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Measure of {nu in [0,1] : f(nu) >= p} for non-increasing piecewise-linear f.
double upper_measure(const PiecewiseLinear& f, double p) noexcept {
    const auto& k = f.knots();
    if (f(0.0) < p) return 0.0;
    if (f(1.0) >= p) return 1.0;
    double prev_x = 0.0;
    double prev_y = f(0.0);
    auto step = [&](double x) -> std::optional<double> {
        const double y = f(x);
        if (y < p) return prev_x + (prev_y - p) / (prev_y - y) * (x - prev_x);
        prev_x = x;
        prev_y = y;
        return std::nullopt;
    };
    for (const auto& kn : k) {
        if (kn.x <= 0.0 || kn.x >= 1.0) continue;
        if (auto r = step(kn.x)) return *r;
    }
    return step(1.0).value_or(1.0);
}

}  // namespace

SplitStream::SplitStream(std::uint64_t seed, std::uint64_t stream) noexcept : state_(seed) {
    std::uint64_t s = stream ^ 0xD1B54A32D192ED03ULL;
    state_ ^= splitmix(s);
}

std::uint64_t SplitStream::next() noexcept { return splitmix(state_); }

double SplitStream::uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

void Population::validate() const {
    if (kind == Kind::Apt) {
        utility.validate();
        for (double t : thresholds)
            if (!(t >= 0.0)) throw DomainError("attention thresholds must be >= 0");
    } else {
        const auto& k = indifference.knots();
        if (k.empty()) throw DomainError("QRUM population needs an indifference-price function");
        if (indifference.left_slope() > 0.0 || indifference.right_slope() > 0.0)
            throw DomainError("indifference-price function must be non-increasing");
        for (std::size_t i = 1; i < k.size(); ++i)
            if (k[i].y > k[i - 1].y) throw DomainError("indifference-price function must be non-increasing");
    }
}

Population Population::apt(UtilityPair u, AttentionCDF g, std::uint64_t seed) {
    Population p;
    p.kind = Kind::Apt;
    p.utility = std::move(u);
    p.attention = std::move(g);
    p.seed = seed;
    p.validate();
    return p;
}

Population Population::apt(UtilityPair u, std::vector<double> thresholds, std::uint64_t seed) {
    if (thresholds.empty()) throw DomainError("finite population needs at least one consumer");
    Population p;
    p.kind = Kind::Apt;
    p.utility = std::move(u);
    p.thresholds = std::move(thresholds);
    std::sort(p.thresholds.begin(), p.thresholds.end());
    p.seed = seed;
    p.validate();
    return p;
}

Population Population::qrum(PiecewiseLinear indifference, std::uint64_t seed) {
    Population p;
    p.kind = Kind::Qrum;
    p.indifference = std::move(indifference);
    p.seed = seed;
    p.validate();
    return p;
}

Population Population::qrum(const QRUMPrimitives& prim, std::uint64_t seed) {
    std::vector<PiecewiseLinear::Knot> k;
    for (std::size_t i = 0; i < prim.nu.size(); ++i) k.push_back({prim.nu[i], (prim.v1[i] - prim.v0[i]) / prim.beta[i]});
    auto f = PiecewiseLinear::from_knots(std::move(k));
    return qrum(f, seed);
}

std::optional<double> reservation_price(const UtilityPair& u, double y, const RunConfig& cfg) {
    const double target = u.u0(y);
    if (u.u1(y) <= target) return std::nullopt;
    if (u.u1(0.0) > target) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "U1(0) > U0(%g): good 1 preferred even at price = income", y);
        throw DomainError(buf);
    }
    double lo = 0.0;
    double hi = y;
    for (int it = 0; it < cfg.bisection_max_iter && hi - lo > cfg.bisection_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (u.u1(y - mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    if (hi - lo > cfg.bisection_tol) throw ConvergenceError("reservation price bisection did not converge");
    return hi;
}

double attention_survival(const Population& pop, double p) noexcept {
    if (pop.finite()) {
        const auto& ts = pop.thresholds;
        auto it = std::upper_bound(ts.begin(), ts.end(), p);
        return static_cast<double>(ts.end() - it) / static_cast<double>(ts.size());
    }
    return 1.0 - pop.attention(p);
}

ChoiceDataset forward_choice_prob(const Population& pop, const PriceGrid& grid, bool inject_breakpoints,
                                  const RunConfig& cfg) {
    PriceGrid g = grid;
    if (inject_breakpoints) {
        std::vector<double> extra;
        if (pop.kind == Population::Kind::Apt) {
            for (double y : grid.incomes())
                if (auto p10 = reservation_price(pop.utility, y, cfg)) extra.push_back(*p10);
            if (pop.finite()) {
                for (double t : pop.thresholds)
                    if (std::isfinite(t)) extra.push_back(t);
            } else {
                for (const auto& k : pop.attention.knots()) extra.push_back(k.t);
            }
        } else {
            for (const auto& k : pop.indifference.knots()) extra.push_back(k.y);
        }
        g = grid.with_prices(extra);
    }

    if (pop.kind == Population::Kind::Qrum) {
        return ChoiceDataset::from_function(g, [&](double p, double) { return upper_measure(pop.indifference, p); });
    }
    return ChoiceDataset::from_function(g, [&](double p, double y) {
        return pop.utility.u0(y) < pop.utility.u1(y - p) ? attention_survival(pop, p) : 0.0;
    });
}

ConsumerEV consumer_ev(const UtilityPair& u, double t, const PriceChange& pc, const RunConfig& cfg) {
    pc.validate();
    if (!u.u0.strictly_increasing()) throw DomainError("consumer EV requires strictly increasing U0");
    if (!u.u1.strictly_increasing()) throw DomainError("consumer EV requires strictly increasing U1");

    const double y = pc.income;
    ConsumerEV r;
    if (pc.p_new < t)
        r.attention = Attention::Full;
    else if (pc.p_old < t)
        r.attention = Attention::Partial;
    else
        r.attention = Attention::None;

    const double u0y = u.u0(y);
    r.exact_boundary = t == pc.p_old || t == pc.p_new || u.u1(y - pc.p_new) == u0y || u.u1(y - pc.p_old) == u0y;

    double rhs = u0y;
    if (r.attention == Attention::Full) rhs = std::max(u0y, u.u1(y - pc.p_new));
    auto lhs = [&](double s) {
        const double a = u.u0(y - s);
        return r.attention == Attention::None ? a : std::max(a, u.u1(y - s - pc.p_old));
    };

    if (lhs(0.0) <= rhs) {
        r.ev = 0.0;
        return r;
    }
    double lo = 0.0;
    double hi = y - pc.p_old;
    if (lhs(hi) > rhs) throw ConvergenceError("EV equation has no root in [0, y - p_old]; U1(0) > U0(y)?");
    int it = 0;
    for (; it < cfg.bisection_max_iter && hi - lo > cfg.bisection_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lhs(mid) >= rhs)
            lo = mid;
        else
            hi = mid;
    }
    if (hi - lo > cfg.bisection_tol) throw ConvergenceError("EV bisection exceeded the iteration limit");
    r.ev = 0.5 * (lo + hi);
    return r;
}

EmpiricalEV monte_carlo_ev(const Population& pop, const PriceChange& pc, std::size_t n, const RunConfig& cfg) {
    if (pop.kind != Population::Kind::Apt) throw DomainError("the EV oracle needs an APT population");
    if (!pop.finite() && n == 0) throw DomainError("oracle needs n >= 1");
    pc.validate();

    const std::size_t count = pop.finite() ? pop.thresholds.size() : n;
    std::vector<ConsumerEV> evs(count);

    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    auto run_chunk = [&](std::size_t c) {
        SplitStream rng(pop.seed, c);
        const std::size_t end = std::min(count, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            const double t = pop.finite() ? pop.thresholds[i] : pop.attention.quantile(rng.uniform());
            evs[i] = consumer_ev(pop.utility, t, pc, cfg);
            evs[i].id = i;
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw == 1 || chunks < 2) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::future<void>> jobs;
        for (std::size_t c = 0; c < chunks; ++c) {
            jobs.push_back(std::async(std::launch::async, run_chunk, c));
            if (jobs.size() >= hw) {
                for (auto& j : jobs) j.get();
                jobs.clear();
            }
        }
        for (auto& j : jobs) j.get();
    }

    EmpiricalEV out;
    out.n = count;
    out.seed = pop.seed;
    std::vector<double> values;
    values.reserve(count);
    for (const auto& e : evs) {
        values.push_back(e.ev);
        out.full += e.attention == Attention::Full;
        out.partial += e.attention == Attention::Partial;
        out.none += e.attention == Attention::None;
        out.exact_boundary += e.exact_boundary;
    }
    std::sort(values.begin(), values.end());
    const double group_tol = std::max(1e-7, 100.0 * cfg.bisection_tol);
    for (std::size_t i = 0; i < values.size();) {
        std::size_t k = i;
        while (k < values.size() && values[k] - values[i] <= group_tol) ++k;
        out.atoms.push_back({values[i], static_cast<double>(k - i) / static_cast<double>(count)});
        i = k;
    }
    return out;
}

}  // namespace aptw
