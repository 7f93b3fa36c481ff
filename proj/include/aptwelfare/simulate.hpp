#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "aptwelfare/choice_data.hpp"
#include "aptwelfare/config.hpp"
#include "aptwelfare/rationalize.hpp"
#include "aptwelfare/welfare.hpp"

namespace aptw {

struct Population {
    enum class Kind { Apt, Qrum };
    Kind kind = Kind::Apt;

    // APT: common utilities, and either a finite list of thresholds
    // (+inf allowed, meaning always attentive) or a threshold distribution.
    UtilityPair utility;
    std::vector<double> thresholds;
    AttentionCDF attention;

    // QRUM: indifference price f(nu) on nu in [0, 1], non-increasing, with
    // nu ~ Uniform(0, 1). Choosing good 1 at price p iff f(nu) >= p.
    PiecewiseLinear indifference;

    std::uint64_t seed = 0;

    bool finite() const noexcept { return !thresholds.empty(); }
    /// Throws DomainError on negative thresholds or malformed primitives.
    void validate() const;

    static Population apt(UtilityPair u, AttentionCDF g, std::uint64_t seed = 0);
    static Population apt(UtilityPair u, std::vector<double> thresholds, std::uint64_t seed = 0);
    static Population qrum(PiecewiseLinear indifference, std::uint64_t seed = 0);
    static Population qrum(const QRUMPrimitives& prim, std::uint64_t seed = 0);
};

enum class Attention { Full, Partial, None };

struct ConsumerEV {
    std::size_t id = 0;
    Attention attention = Attention::None;
    double ev = 0.0;
    bool exact_boundary = false;  // on a weak-inequality boundary of the case analysis
};

struct EmpiricalEV {
    std::vector<EvAtom> atoms;  // ascending by value
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t full = 0;
    std::size_t partial = 0;
    std::size_t none = 0;
    std::size_t exact_boundary = 0;
};

/// Price at which U1(y - p) = U0(y), located by bisection on [0, y]. The
/// returned value is the upper end of the final bracket, so U1(y - p10) <=
/// U0(y) holds exactly. nullopt when good 0 is weakly preferred even at p = 0.
/// Throws DomainError if U1(0) > U0(y).
std::optional<double> reservation_price(const UtilityPair& u, double y, const RunConfig& cfg = {});

/// Fraction of the population considering good 1 at price p: #{t > p} / N or
/// 1 - G(p).
double attention_survival(const Population& pop, double p) noexcept;

/// Choice probabilities on the grid. With inject_breakpoints the grid is first
/// extended by each income's p10 and the attention (or f) knots, so that
/// discontinuities land on grid prices.
ChoiceDataset forward_choice_prob(const Population& pop, const PriceGrid& grid, bool inject_breakpoints = false,
                                  const RunConfig& cfg = {});

/// EV of one consumer with threshold t, solved from the defining equation by
/// bisection on S in [0, y - p_old]. Requires strictly increasing U0 and U1.
ConsumerEV consumer_ev(const UtilityPair& u, double t, const PriceChange& pc, const RunConfig& cfg = {});

/// Draws n thresholds from the attention distribution (finite populations use
/// their own list instead) and aggregates consumer_ev into atoms. Depends only
/// on (population, pc, n, seed).
EmpiricalEV monte_carlo_ev(const Population& pop, const PriceChange& pc, std::size_t n, const RunConfig& cfg = {});

/// Uniform(0,1) stream used by the oracle; split per chunk from one seed.
class SplitStream {
public:
    explicit SplitStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;
    double uniform() noexcept;  // in (0, 1)
    std::uint64_t next() noexcept;

private:
    std::uint64_t state_;
};

}  // namespace aptw
