#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aptwelfare/choice_data.hpp"
#include "aptwelfare/config.hpp"

namespace aptw {

enum class AxiomId { A_i, A_ii, B, C, D, E, A_QRUM, B_QRUM, C_QRUM };

// Warn is used only by Axiom D (see check_axiom_d); it does not make the
// dataset fail.
enum class Verdict { Pass, Warn, Fail };

std::string_view to_string(AxiomId id) noexcept;
std::string_view to_string(Verdict v) noexcept;

struct Cell {
    double price = 0.0;
    double income = 0.0;
    double value = 0.0;
};

struct Witness {
    std::vector<Cell> cells;
    std::string detail;
};

struct AxiomReport {
    AxiomId axiom = AxiomId::A_i;
    Verdict verdict = Verdict::Pass;
    std::vector<Witness> witnesses;  // empty iff verdict == Pass
    std::string note;                // configuration that shaped the verdict, if any

    bool passed() const noexcept { return verdict != Verdict::Fail; }
};

// A(i): q(p + e, y + e) <= q(p, y) + eq_tol for every on-grid diagonal pair.
AxiomReport check_axiom_a_i(const ChoiceDataset& ds, const RunConfig& cfg = {});
// A(ii): every income column non-increasing in price.
AxiomReport check_axiom_a_ii(const ChoiceDataset& ds, const RunConfig& cfg = {});
// Both parts, A(i) first.
std::vector<AxiomReport> check_axiom_a(const ChoiceDataset& ds, const RunConfig& cfg = {});

AxiomReport check_axiom_b(const ChoiceDataset& ds, const RunConfig& cfg = {});
AxiomReport check_axiom_c(const ChoiceDataset& ds, const RunConfig& cfg = {});

// On a finite grid the only pattern Axiom D can catch is the last positive
// price sitting directly before the zero tail. A drop into the tail below
// jump_threshold is read as continuous decay and passes. A larger drop is a
// Warn (a discontinuity may lie between the grid points) unless
// cfg.exact_grid declares the grid to be the full support, in which case it
// is a Fail.
AxiomReport check_axiom_d(const ChoiceDataset& ds, const RunConfig& cfg = {});

AxiomReport check_axiom_e(const ChoiceDataset& ds, const RunConfig& cfg = {});

/// A(i), A(ii), B, C, D, E in that order.
std::vector<AxiomReport> check_apt(const ChoiceDataset& ds, const RunConfig& cfg = {});

bool all_passed(const std::vector<AxiomReport>& reports) noexcept;

/// q(p) over the full price grid for an income-invariant dataset. Throws
/// IncomeVarianceError naming the first price and income pair that differ.
std::vector<double> income_invariant_curve(const ChoiceDataset& ds, double eq_tol);

/// A-QRUM, B-QRUM, C-QRUM. Throws IncomeVarianceError if the dataset has
/// income effects (not a QRUM candidate at all).
///
/// B-QRUM is the Lipschitz proxy drop <= continuity_modulus * price step.
/// C-QRUM requires q(0) = 1 and q(y, y) = 0 for every grid income y.
std::vector<AxiomReport> check_qrum(const ChoiceDataset& ds, const RunConfig& cfg = {});

/// Re-evaluates a witness against the dataset and reports whether it still
/// demonstrates a violation of `axiom`.
bool witness_replays(const ChoiceDataset& ds, AxiomId axiom, const Witness& w, const RunConfig& cfg = {});

}  // namespace aptw
