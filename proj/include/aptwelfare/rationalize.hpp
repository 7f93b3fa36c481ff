#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "aptwelfare/choice_data.hpp"
#include "aptwelfare/config.hpp"

namespace aptw {

/// Continuous piecewise-linear function given by knots with strictly
/// increasing abscissae. Beyond the outer knots it continues with explicit
/// end slopes (by default those of the outer segments, 0 for a single knot).
class PiecewiseLinear {
public:
    struct Knot {
        double x;
        double y;
    };

    PiecewiseLinear() = default;

    static PiecewiseLinear from_knots(std::vector<Knot> knots);
    static PiecewiseLinear affine(double slope, double intercept);
    static PiecewiseLinear identity() { return affine(1.0, 0.0); }

    double operator()(double x) const noexcept;

    const std::vector<Knot>& knots() const noexcept { return knots_; }
    double left_slope() const noexcept { return left_slope_; }
    double right_slope() const noexcept { return right_slope_; }

    bool non_decreasing() const noexcept;
    bool strictly_increasing() const noexcept;
    bool is_identity() const noexcept;

private:
    std::vector<Knot> knots_;
    double left_slope_ = 0.0;
    double right_slope_ = 0.0;
};

struct UtilityPair {
    PiecewiseLinear u0;  // income -> utility of good 0, non-decreasing
    PiecewiseLinear u1;  // residual income -> utility of good 1, strictly increasing

    /// Throws DomainError if the monotonicity requirements fail.
    void validate() const;
};

/// Distribution of attention-price thresholds. Knots are ordered by t; two
/// knots with the same t encode a jump (the later value holds at t, so G is
/// right-continuous). Between distinct knots G is either held (Step) or
/// interpolated (Linear). Past the last knot G stays at its last value; the
/// remaining mass sits at t = +infinity.
class AttentionCDF {
public:
    enum class Interp { Step, Linear };

    struct Knot {
        double t;
        double g;
        bool extended = false;  // not identified by data; chosen by the monotone extension
    };

    AttentionCDF() = default;
    AttentionCDF(std::vector<Knot> knots, Interp interp, bool tail_flag);

    /// Uniform on [a, b] scaled to total finite mass 1 - tail_mass.
    static AttentionCDF uniform(double a, double b, double tail_mass = 0.0);
    /// Empirical CDF of a finite list of thresholds (+inf allowed).
    static AttentionCDF empirical(std::span<const double> thresholds);

    double operator()(double t) const noexcept;
    /// Smallest t with G(t) >= u; +inf when u exceeds the finite mass.
    double quantile(double u) const noexcept;

    double tail_mass() const noexcept { return knots_.empty() ? 1.0 : 1.0 - knots_.back().g; }
    bool tail_flag() const noexcept { return tail_flag_; }
    Interp interp() const noexcept { return interp_; }
    const std::vector<Knot>& knots() const noexcept { return knots_; }

private:
    std::vector<Knot> knots_;
    Interp interp_ = Interp::Step;
    bool tail_flag_ = false;
};

/// Model choice probability 1{U0(y) < U1(y - p)} (1 - G(p)); ties go to good 0.
double apt_choice_prob(const UtilityPair& u, const AttentionCDF& g, double p, double y) noexcept;

struct QRUMPrimitives {
    std::vector<double> nu;    // quantile mesh, ascending in [0, 1]
    std::vector<double> f;     // indifference price at each nu, non-increasing
    std::vector<double> v0;
    std::vector<double> v1;
    std::vector<double> beta;  // > 0; f = (v1 - v0) / beta
};

struct AptRationalization {
    UtilityPair utility;
    AttentionCDF attention;
    bool verified = false;
};

/// U0(y) = y - p_bar(y) at every grid income. Throws ConstructionError if the
/// result decreases between two incomes.
PiecewiseLinear construct_u0(const ChoiceDataset& ds, const RunConfig& cfg = {});
PiecewiseLinear construct_u1();
/// G(p) = 1 - q(p, y) wherever some income has q > 0, extended monotonically
/// elsewhere (extended knots are flagged).
AttentionCDF construct_g(const ChoiceDataset& ds, const RunConfig& cfg = {});

/// Builds (U0, U1, G) and re-evaluates every grid cell; throws
/// ConstructionError naming the first cell that is not reproduced.
AptRationalization apt_rationalize(const ChoiceDataset& ds, const RunConfig& cfg = {});

/// sup{ p on grid : q(p) >= nu } for an income-invariant dataset.
double qrum_quantile(const ChoiceDataset& ds, double nu, const RunConfig& cfg = {});

/// f tabulated at nu = i / M, i = 0..M, with beta = 1, V0 = 0, V1 = f. The
/// forward check compares the share of mesh midpoints with f >= p to q(p)
/// within 2 / M at every grid price.
QRUMPrimitives qrum_construct(const ChoiceDataset& ds, const RunConfig& cfg = {});

}  // namespace aptw
