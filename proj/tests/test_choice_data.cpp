#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "aptwelfare/choice_data.hpp"
#include "aptwelfare/errors.hpp"
#include "support/datasets.hpp"
#include "support/generators.hpp"

using namespace aptw;
using namespace aptw::testing;

namespace {

std::string k3_csv() {
    std::ostringstream s;
    s << "price,income,share\n";
    for (int i = 0; i <= 10; ++i) s << i << ",10," << (i <= 3 ? 1.0 - i / 3.0 : 0.0) << "\n";
    return s.str();
}

}  // namespace

TEST_CASE("grid construction") {
    auto g = PriceGrid::uniform(0.01, {10.0});
    CHECK(g.prices().size() == 1001);
    CHECK(g.prices()[100] == doctest::Approx(1.0));
    CHECK(g.income_index(10.0));
    CHECK(g.column_size(0) == 1001);

    CHECK_THROWS_AS(PriceGrid::make({0.0, 1.0, 2.0}, {10.0}), CoverageError);
    CHECK_THROWS_AS(PriceGrid::make({1.0, 2.0}, {2.0}), CoverageError);
    CHECK_THROWS_AS(PriceGrid::make({0.0, 2.0, 1.0}, {2.0}), DomainError);
    CHECK_THROWS_AS(PriceGrid::make({0.0, 1.0}, {-1.0}), DomainError);

    auto h = PriceGrid::make({0.0, 1.0, 2.0}, {1.0, 2.0});
    CHECK(h.column_size(0) == 2);
    CHECK(h.column_size(1) == 3);
    const double extra[] = {0.5, 1.0 + 1e-12, 7.0};
    auto e = h.with_prices(extra);
    CHECK(e.prices() == std::vector<double>{0.0, 0.5, 1.0, 2.0});
}

TEST_CASE("csv parse of the k = 3 example") {
    std::istringstream in(k3_csv());
    auto ds = parse_csv(in);
    CHECK(ds.q1(1.0, 10.0) == doctest::Approx(2.0 / 3.0));
    CHECK(ds.q1(0.0, 10.0) == 1.0);
    CHECK_THROWS_AS(ds.q1(11.0, 10.0), LookupError);
    CHECK_THROWS_AS(ds.q1(0.5, 10.0), LookupError);
}

TEST_CASE("csv tolerates BOM, blank lines and any row order") {
    std::istringstream in("\xEF\xBB\xBFprice,income,share\n2,2,0\n\n0,2,1\n1,2,0.5\n");
    auto ds = parse_csv(in);
    CHECK(ds.q1(1.0, 2.0) == 0.5);
}

TEST_CASE("csv rejections") {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_csv(in);
    };
    CHECK_THROWS_AS(parse("price,income,share\n0,10,1.2\n"), DomainError);
    try {
        parse("price,income,share\n0,1,1\n1,1,1.2\n");
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("price,income,share\n0,10,1\n1,10,0.5\n2,10,0\n"), CoverageError);
    CHECK_THROWS_AS(parse("price,income,share\n0,2,1\n2,2,0\n0,3,1\n3,3,0\n"), CoverageError);
    CHECK_THROWS_AS(parse("p,y,s\n0,1,1\n"), ParseError);
    CHECK_THROWS_AS(parse("price,income,share\n0,1\n"), ParseError);
    CHECK_THROWS_AS(parse("price,income,share\nzero,1,1\n"), ParseError);
    CHECK_THROWS_AS(parse("price,income,share\n0,1,1\n0,1,1\n1,1,0\n"), DomainError);
    CHECK_THROWS_AS(parse("price,income,share\n2,1,0\n"), DomainError);
    CHECK_THROWS_AS(parse("price,income,share\n"), CoverageError);
}

TEST_CASE("csv round trip is exact") {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        auto k = random_curve_case(rng);
        auto ds = k.dataset();
        std::ostringstream out;
        write_csv(ds, out);
        std::istringstream in(out.str());
        auto back = parse_csv(in);
        REQUIRE(back.grid().prices().size() == ds.grid().prices().size());
        for (std::size_t j = 0; j < ds.grid().incomes().size(); ++j)
            for (std::size_t r = 0; r < ds.grid().column_size(j); ++r) CHECK(back.at(r, j) == ds.at(r, j));
    }
}

TEST_CASE("min_zero_price") {
    CHECK(min_zero_price(k3_dataset(), 10.0) == doctest::Approx(3.0));
    CHECK(min_zero_price(column_dataset(0.5, 4.0, [](double) { return 0.0; }), 4.0) == 0.0);
    CHECK(min_zero_price(column_dataset(0.5, 4.0, [](double p) { return p < 4.0 ? 0.5 : 0.0; }), 4.0) == 4.0);
    CHECK_THROWS_AS(min_zero_price(column_dataset(0.5, 4.0, [](double) { return 0.1; }), 4.0), NoZeroError);
}

TEST_CASE("jump_at") {
    for (double step : {0.1, 0.05, 0.01}) {
        auto r = jump_at(k3_dataset(step), 10.0, 3.0, 0.05);
        CHECK_FALSE(r.is_jump);
        CHECK(r.left_value == doctest::Approx(step / 3.0));
    }
    auto step_ds = column_dataset(1.0, 5.0, [](double p) { return p < 2.0 ? 0.4 : 0.0; });
    auto r = jump_at(step_ds, 5.0, 2.0, 0.05);
    CHECK(r.is_jump);
    CHECK(r.left_value - r.value == doctest::Approx(0.4));
    auto boundary = column_dataset(1.0, 5.0, [](double p) { return p < 2.0 ? 0.05 : 0.0; });
    CHECK(jump_at(boundary, 5.0, 2.0, 0.05).is_jump);
    CHECK_THROWS_AS(jump_at(step_ds, 5.0, 0.0, 0.05), LookupError);
}
