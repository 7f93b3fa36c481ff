#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aptw {

// Relative tolerance used to match a money amount to a grid point. Grid
// values come from decimal text, so exact double equality is too strict.
inline constexpr double kGridMatchTol = 1e-9;

bool same_money(double a, double b) noexcept;

/// Finite price x income grid. Prices are strictly ascending and start at 0;
/// every income is itself a grid price, so each income column ends at p = y.
class PriceGrid {
public:
    PriceGrid() = default;

    /// Validates and builds a grid. Throws DomainError / CoverageError.
    static PriceGrid make(std::vector<double> prices, std::vector<double> incomes);

    /// Prices k * step for k = 0 .. ceil(max income / step). Incomes must fall
    /// on that lattice and are snapped to the generated price values.
    static PriceGrid uniform(double step, std::vector<double> incomes);

    const std::vector<double>& prices() const noexcept { return prices_; }
    const std::vector<double>& incomes() const noexcept { return incomes_; }

    std::optional<std::size_t> price_index(double p) const noexcept;
    std::optional<std::size_t> income_index(double y) const noexcept;

    /// Number of grid prices <= incomes()[income_idx].
    std::size_t column_size(std::size_t income_idx) const noexcept { return column_sizes_[income_idx]; }

    /// Returns a grid with the extra prices merged in (values within
    /// kGridMatchTol of an existing price are dropped). Extra prices above the
    /// largest income are ignored.
    PriceGrid with_prices(std::span<const double> extra) const;

private:
    std::vector<double> prices_;
    std::vector<double> incomes_;
    std::vector<std::size_t> column_sizes_;
};

/// Observed choice probabilities of good 1, q(p, y), on every grid cell with
/// p <= y. Immutable after construction.
class ChoiceDataset {
public:
    ChoiceDataset() = default;

    /// columns[j][i] = q(prices[i], incomes[j]); column j must have exactly
    /// grid.column_size(j) entries, each in [0, 1].
    ChoiceDataset(PriceGrid grid, std::vector<std::vector<double>> columns);

    static ChoiceDataset from_function(const PriceGrid& grid,
                                       const std::function<double(double, double)>& q);

    const PriceGrid& grid() const noexcept { return grid_; }

    /// Exact stored value at a grid point; LookupError for anything off-grid
    /// or with p > y. Never interpolates.
    double q1(double p, double y) const;

    double at(std::size_t price_idx, std::size_t income_idx) const noexcept {
        return columns_[income_idx][price_idx];
    }
    std::span<const double> column(std::size_t income_idx) const noexcept { return columns_[income_idx]; }

    std::size_t require_income(double y) const;
    std::size_t require_price(double p) const;

private:
    PriceGrid grid_;
    std::vector<std::vector<double>> columns_;
};

struct JumpReport {
    double at_price = 0.0;
    double left_value = 0.0;  // q at the largest grid price strictly below at_price
    double value = 0.0;
    bool is_jump = false;      // left_value - value >= threshold
};

/// CSV with header `price,income,share`, any row order, one cell per row.
ChoiceDataset parse_csv(std::istream& in);
ChoiceDataset load_csv(const std::string& path);

void write_csv(const ChoiceDataset& ds, std::ostream& out, int precision = 17);
void save_csv(const ChoiceDataset& ds, const std::string& path, int precision = 17);

/// Start of the zero tail in the income-y column: the smallest grid price
/// p_bar with q(p', y) <= eq_tol for every grid p' >= p_bar. Throws
/// NoZeroError when q(y, y) > eq_tol.
double min_zero_price(const ChoiceDataset& ds, double y, double eq_tol = 1e-9);

/// Compares q at p with q at its grid predecessor in the income-y column.
/// p must be a grid price above the smallest one (LookupError otherwise).
JumpReport jump_at(const ChoiceDataset& ds, double y, double p, double jump_threshold);

}  // namespace aptw
