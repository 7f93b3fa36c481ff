#pragma once

#include <optional>
#include <vector>

#include "aptwelfare/choice_data.hpp"
#include "aptwelfare/config.hpp"

namespace aptw {

/// Price increase p_old -> p_new at common income y.
struct PriceChange {
    double p_old = 0.0;
    double p_new = 0.0;
    double income = 0.0;

    /// Throws DomainError unless 0 <= p_old < p_new <= income.
    void validate() const;
    double delta() const noexcept { return p_new - p_old; }
    bool operator==(const PriceChange&) const = default;
};

struct ReservationBound {
    double p_bar = 0.0;
    double p10_lo = 0.0;
    double p10_hi = 0.0;
    bool point_identified = false;
    bool jump_at_p_bar = false;
};

struct EvAtom {
    double value = 0.0;
    double mass = 0.0;
};

struct EvInterval {
    double lo = 0.0;
    double hi = 0.0;
    double mass = 0.0;
};

struct CdfPoint {
    double z = 0.0;
    double cdf = 0.0;
};

enum class EvModel { Apt, Rum };

/// Distribution of equivalent variation. APT results are discrete: atoms plus
/// an optional interval atom whose location inside [lo, hi] is not
/// identified. RUM results additionally carry the CDF sampled at grid
/// offsets z in [0, delta); between samples the CDF is only known to be
/// monotone, and it is evaluated as a right-continuous step there.
struct EVDistribution {
    EvModel model = EvModel::Apt;
    PriceChange change;
    std::vector<EvAtom> atoms;  // ascending by value, positive masses
    std::optional<EvInterval> interval;
    std::vector<CdfPoint> cdf_samples;  // RUM only
    double continuous_mass = 0.0;       // RUM mass strictly inside (0, delta)
    bool point_identified = true;
    bool not_applicable = false;        // q(p_old, y) = 0

    double total_mass() const noexcept;

    enum class Envelope { Lower, Upper };
    /// F(z). Interval mass counts at lo for the Lower envelope (smallest EV)
    /// and at hi for the Upper one.
    double cdf(double z, Envelope env = Envelope::Lower) const noexcept;
    /// z values where F can change.
    std::vector<double> breakpoints() const;
};

/// p_bar = start of the zero tail at income y. Point identified (p10 = p_bar)
/// under assume_full_attention or when q jumps into the zero tail at p_bar;
/// otherwise p10 is only known to lie in [p_bar, y]. Throws
/// NotApplicableError when q(p_old, y) = 0.
ReservationBound p10_bounds(const ChoiceDataset& ds, double y, double p_old, bool assume_full_attention,
                            const RunConfig& cfg = {});

EVDistribution ev_distribution_apt(const ChoiceDataset& ds, const PriceChange& pc, bool assume_full_attention,
                                   const RunConfig& cfg = {});

EVDistribution ev_distribution_rum(const ChoiceDataset& ds, const PriceChange& pc, const RunConfig& cfg = {});

struct FosdResult {
    bool verdict = false;        // F_a(z) <= F_b(z) + eq_tol everywhere (a's interval at lo)
    bool upper_verdict = false;  // same with a's interval at hi
    double max_gap_at = 0.0;     // argmax of F_b(z) - F_a(z), smallest on ties
    double max_gap = 0.0;
    std::vector<double> grid;    // evaluation points
};

/// Does `a` first-order stochastically dominate `b`? Throws ProvenanceError
/// if the two distributions describe different price changes. Extra
/// evaluation points (typically the dataset's price offsets) may be passed.
FosdResult fosd_check(const EVDistribution& a, const EVDistribution& b, const std::vector<double>& extra_points = {},
                      const RunConfig& cfg = {});

/// Price offsets p - p_old for grid prices p in [p_old, y].
std::vector<double> price_offsets(const ChoiceDataset& ds, const PriceChange& pc);

}  // namespace aptw
