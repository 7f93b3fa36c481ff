#include "aptwelfare/choice_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "aptwelfare/errors.hpp"

namespace aptw {

namespace {

std::string money_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::optional<std::size_t> find_sorted(const std::vector<double>& xs, double v) noexcept {
    auto it = std::lower_bound(xs.begin(), xs.end(), v);
    if (it != xs.end() && same_money(*it, v)) return static_cast<std::size_t>(it - xs.begin());
    if (it != xs.begin() && same_money(*std::prev(it), v)) return static_cast<std::size_t>(it - xs.begin() - 1);
    return std::nullopt;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t row, const char* name) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ParseError(std::string("malformed ") + name + " field '" + std::string(field) + "'", row);
    }
    return v;
}

}  // namespace

bool same_money(double a, double b) noexcept {
    return std::abs(a - b) <= kGridMatchTol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

PriceGrid PriceGrid::make(std::vector<double> prices, std::vector<double> incomes) {
    if (prices.empty()) throw CoverageError("price grid is empty");
    if (incomes.empty()) throw CoverageError("income grid is empty");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!std::isfinite(prices[i]) || prices[i] < 0.0)
            throw DomainError("negative or non-finite price " + money_str(prices[i]));
        if (i > 0 && !(prices[i] > prices[i - 1]) )
            throw DomainError("prices must be strictly increasing");
    }
    for (std::size_t j = 0; j < incomes.size(); ++j) {
        if (!std::isfinite(incomes[j]) || incomes[j] <= 0.0)
            throw DomainError("non-positive or non-finite income " + money_str(incomes[j]));
        if (j > 0 && !(incomes[j] > incomes[j - 1]))
            throw DomainError("incomes must be strictly increasing");
    }
    if (prices.front() != 0.0) throw CoverageError("price grid must contain 0");

    PriceGrid g;
    g.column_sizes_.reserve(incomes.size());
    for (double y : incomes) {
        auto idx = find_sorted(prices, y);
        if (!idx) throw CoverageError("income " + money_str(y) + " is not a grid price (largest price below it < income)");
        g.column_sizes_.push_back(*idx + 1);
    }
    // Snap incomes to the exact price values so y - p arithmetic is consistent.
    for (std::size_t j = 0; j < incomes.size(); ++j) incomes[j] = prices[g.column_sizes_[j] - 1];
    g.prices_ = std::move(prices);
    g.incomes_ = std::move(incomes);
    return g;
}

PriceGrid PriceGrid::uniform(double step, std::vector<double> incomes) {
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("grid step must be positive");
    if (incomes.empty()) throw CoverageError("income grid is empty");
    std::sort(incomes.begin(), incomes.end());
    const double top = incomes.back();
    const auto n = static_cast<std::size_t>(std::ceil(top / step - 1e-9));
    // Dividing by an integer reciprocal reproduces decimal text exactly
    // (k / 100.0 == strtod("0.07") for k = 7), which k * 0.01 does not.
    const double inv = std::round(1.0 / step);
    const bool decimal = inv >= 1.0 && std::abs(inv * step - 1.0) < 1e-12;
    std::vector<double> prices(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        prices[k] = decimal ? static_cast<double>(k) / inv : static_cast<double>(k) * step;
    return make(std::move(prices), std::move(incomes));
}

std::optional<std::size_t> PriceGrid::price_index(double p) const noexcept { return find_sorted(prices_, p); }
std::optional<std::size_t> PriceGrid::income_index(double y) const noexcept { return find_sorted(incomes_, y); }

PriceGrid PriceGrid::with_prices(std::span<const double> extra) const {
    std::vector<double> merged = prices_;
    for (double p : extra) {
        if (!std::isfinite(p) || p < 0.0 || p > incomes_.back()) continue;
        if (!find_sorted(merged, p)) merged.insert(std::upper_bound(merged.begin(), merged.end(), p), p);
    }
    return make(std::move(merged), incomes_);
}

ChoiceDataset::ChoiceDataset(PriceGrid grid, std::vector<std::vector<double>> columns)
    : grid_(std::move(grid)), columns_(std::move(columns)) {
    if (columns_.size() != grid_.incomes().size()) throw CoverageError("one column per income required");
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (columns_[j].size() != grid_.column_size(j))
            throw CoverageError("column for income " + money_str(grid_.incomes()[j]) + " has holes");
        for (std::size_t i = 0; i < columns_[j].size(); ++i) {
            const double v = columns_[j][i];
            if (!(v >= 0.0 && v <= 1.0))
                throw DomainError("share " + money_str(v) + " outside [0,1] at price " +
                                  money_str(grid_.prices()[i]) + ", income " + money_str(grid_.incomes()[j]));
        }
    }
}

ChoiceDataset ChoiceDataset::from_function(const PriceGrid& grid, const std::function<double(double, double)>& q) {
    std::vector<std::vector<double>> cols(grid.incomes().size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        cols[j].resize(grid.column_size(j));
        for (std::size_t i = 0; i < cols[j].size(); ++i) cols[j][i] = q(grid.prices()[i], grid.incomes()[j]);
    }
    return ChoiceDataset(grid, std::move(cols));
}

std::size_t ChoiceDataset::require_income(double y) const {
    auto j = grid_.income_index(y);
    if (!j) throw LookupError("income " + money_str(y) + " is not on the income grid");
    return *j;
}

std::size_t ChoiceDataset::require_price(double p) const {
    auto i = grid_.price_index(p);
    if (!i) throw LookupError("price " + money_str(p) + " is not on the price grid");
    return *i;
}

double ChoiceDataset::q1(double p, double y) const {
    const std::size_t j = require_income(y);
    const std::size_t i = require_price(p);
    if (i >= grid_.column_size(j))
        throw LookupError("price " + money_str(p) + " exceeds income " + money_str(y));
    return columns_[j][i];
}

ChoiceDataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (row == 1 && sv.size() >= 3 && static_cast<unsigned char>(sv[0]) == 0xEF) sv.remove_prefix(3);  // BOM
        if (sv.empty()) continue;
        if (sv != "price,income,share") throw ParseError("expected header 'price,income,share'", row);
        have_header = true;
    }
    if (!have_header) throw ParseError("missing header", row);

    std::map<std::pair<double, double>, double> cells;
    std::map<double, int> prices;
    std::map<double, int> incomes;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        std::string_view fields[3];
        std::size_t nf = 0;
        std::size_t start = 0;
        for (std::size_t k = 0; k <= sv.size(); ++k) {
            if (k == sv.size() || sv[k] == ',') {
                if (nf == 3) throw ParseError("expected 3 fields", row);
                fields[nf++] = sv.substr(start, k - start);
                start = k + 1;
            }
        }
        if (nf != 3) throw ParseError("expected 3 fields", row);
        const double p = parse_number(fields[0], row, "price");
        const double y = parse_number(fields[1], row, "income");
        const double s = parse_number(fields[2], row, "share");
        const std::string at = "row " + std::to_string(row) + ": ";
        if (p < 0.0) throw DomainError(at + "negative price");
        if (y <= 0.0) throw DomainError(at + "non-positive income");
        if (s < 0.0 || s > 1.0) throw DomainError(at + "share " + money_str(s) + " outside [0,1]");
        if (p > y) throw DomainError(at + "price exceeds income");
        if (!cells.emplace(std::make_pair(p, y), s).second) throw DomainError(at + "duplicate (price, income) cell");
        prices[p];
        incomes[y];
    }
    if (cells.empty()) throw CoverageError("no data rows");

    std::vector<double> pv, yv;
    for (auto& kv : prices) pv.push_back(kv.first);
    for (auto& kv : incomes) yv.push_back(kv.first);
    PriceGrid grid = PriceGrid::make(pv, yv);

    std::vector<std::vector<double>> cols(yv.size());
    for (std::size_t j = 0; j < yv.size(); ++j) {
        cols[j].resize(grid.column_size(j));
        for (std::size_t i = 0; i < cols[j].size(); ++i) {
            auto it = cells.find({pv[i], yv[j]});
            if (it == cells.end())
                throw CoverageError("missing cell price=" + money_str(pv[i]) + ", income=" + money_str(yv[j]));
            cols[j][i] = it->second;
        }
    }
    return ChoiceDataset(std::move(grid), std::move(cols));
}

ChoiceDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse_csv(in);
}

void write_csv(const ChoiceDataset& ds, std::ostream& out, int precision) {
    const auto& g = ds.grid();
    out << "price,income,share\n";
    char buf[128];
    for (std::size_t j = 0; j < g.incomes().size(); ++j) {
        for (std::size_t i = 0; i < g.column_size(j); ++i) {
            std::snprintf(buf, sizeof buf, "%.*g,%.*g,%.*g\n", precision, g.prices()[i], precision,
                          g.incomes()[j], precision, ds.at(i, j));
            out << buf;
        }
    }
}

void save_csv(const ChoiceDataset& ds, const std::string& path, int precision) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    write_csv(ds, out, precision);
}

double min_zero_price(const ChoiceDataset& ds, double y, double eq_tol) {
    const std::size_t j = ds.require_income(y);
    auto col = ds.column(j);
    if (col.back() > eq_tol)
        throw NoZeroError("q(y, y) = " + money_str(col.back()) + " > 0 at income " + money_str(y) +
                          ": no zero price on the grid");
    std::size_t start = col.size() - 1;
    while (start > 0 && col[start - 1] <= eq_tol) --start;
    return ds.grid().prices()[start];
}

JumpReport jump_at(const ChoiceDataset& ds, double y, double p, double jump_threshold) {
    const std::size_t j = ds.require_income(y);
    const std::size_t i = ds.require_price(p);
    if (i == 0) throw LookupError("jump_at needs a price above the smallest grid price");
    if (i >= ds.grid().column_size(j)) throw LookupError("price " + money_str(p) + " exceeds income");
    JumpReport r;
    r.at_price = ds.grid().prices()[i];
    r.left_value = ds.at(i - 1, j);
    r.value = ds.at(i, j);
    r.is_jump = (r.left_value - r.value) >= jump_threshold;
    return r;
}

}  // namespace aptw
