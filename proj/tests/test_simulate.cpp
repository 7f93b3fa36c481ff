#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aptwelfare/errors.hpp"
#include "aptwelfare/simulate.hpp"
#include "support/datasets.hpp"
#include "support/generators.hpp"

using namespace aptw;
using namespace aptw::testing;

namespace {

// u0(y) = y, u1(z) = z + 3: p10 = 3 at every income.
UtilityPair example_utility() {
    return {PiecewiseLinear::identity(), PiecewiseLinear::affine(1.0, 3.0)};
}

const PriceChange kChange{1.0, 2.0, 10.0};

double mass_at(const EmpiricalEV& e, double v) {
    double m = 0.0;
    for (const auto& a : e.atoms)
        if (std::abs(a.value - v) < 1e-6) m += a.mass;
    return m;
}

}  // namespace

TEST_CASE("forward simulation of the example") {
    auto grid = PriceGrid::uniform(0.01, {10.0});
    auto ds = forward_choice_prob(Population::apt(example_utility(), AttentionCDF::uniform(0.0, 3.0)), grid);
    auto ref = k3_dataset();
    for (std::size_t r = 0; r < grid.column_size(0); ++r) CHECK(ds.at(r, 0) == doctest::Approx(ref.at(r, 0)).epsilon(1e-12));

    auto one = forward_choice_prob(Population::apt(example_utility(), std::vector<double>{5.0}), grid);
    CHECK(one.q1(2.99, 10.0) == 1.0);
    CHECK(one.q1(3.0, 10.0) == 0.0);

    auto qrum = forward_choice_prob(Population::qrum(PiecewiseLinear::from_knots({{0.0, 3.0}, {1.0, 0.0}})), grid);
    for (std::size_t r = 0; r < grid.column_size(0); ++r) CHECK(qrum.at(r, 0) == doctest::Approx(ref.at(r, 0)));
}

TEST_CASE("threshold equality means no attention") {
    auto grid = PriceGrid::uniform(1.0, {10.0});
    auto ds = forward_choice_prob(Population::apt(example_utility(), std::vector<double>{2.0}), grid);
    CHECK(ds.q1(1.0, 10.0) == 1.0);
    CHECK(ds.q1(2.0, 10.0) == 0.0);
}

TEST_CASE("breakpoint injection") {
    auto u = UtilityPair{PiecewiseLinear::identity(), PiecewiseLinear::affine(1.0, 2.3)};
    auto pop = Population::apt(u, AttentionCDF::uniform(0.0, 5.0, 0.2));
    auto grid = PriceGrid::uniform(0.5, {10.0});
    auto plain = forward_choice_prob(pop, grid, false);
    auto inj = forward_choice_prob(pop, grid, true);
    CHECK(inj.grid().prices().size() > plain.grid().prices().size());
    CHECK(min_zero_price(inj, 10.0) == doctest::Approx(2.3).epsilon(1e-8));
    CHECK(min_zero_price(plain, 10.0) == doctest::Approx(2.5));
}

TEST_CASE("reservation price") {
    auto p = reservation_price(example_utility(), 10.0);
    REQUIRE(p);
    CHECK(*p == doctest::Approx(3.0).epsilon(1e-9));
    UtilityPair never{PiecewiseLinear::affine(1.0, 5.0), PiecewiseLinear::identity()};
    CHECK_FALSE(reservation_price(never, 10.0));
    CHECK_THROWS_AS(Population::apt(example_utility(), std::vector<double>{-1.0}), DomainError);
}

TEST_CASE("consumer EV by case") {
    auto u = example_utility();
    auto full = consumer_ev(u, 5.0, kChange);
    CHECK(full.attention == Attention::Full);
    CHECK(full.ev == doctest::Approx(1.0).epsilon(1e-9));
    auto part = consumer_ev(u, 1.5, kChange);
    CHECK(part.attention == Attention::Partial);
    CHECK(part.ev == doctest::Approx(2.0).epsilon(1e-9));
    auto none = consumer_ev(u, 0.5, kChange);
    CHECK(none.attention == Attention::None);
    CHECK(none.ev == 0.0);
    auto edge = consumer_ev(u, 1.0, kChange);
    CHECK(edge.attention == Attention::None);
    CHECK(edge.ev == 0.0);
    auto at_new = consumer_ev(u, 2.0, kChange);
    CHECK(at_new.attention == Attention::Partial);
    auto boundary = consumer_ev(u, kInf, {1.0, 3.0, 10.0});
    CHECK(boundary.ev == doctest::Approx(2.0));
    CHECK(boundary.exact_boundary);
    UtilityPair flat{PiecewiseLinear::from_knots({{0, 1}, {10, 1}}), PiecewiseLinear::identity()};
    CHECK_THROWS_AS(consumer_ev(flat, 5.0, kChange), DomainError);
}

TEST_CASE("Monte-Carlo oracle") {
    auto pop = Population::apt(example_utility(), AttentionCDF::uniform(0.0, 3.0), 42);
    auto e = monte_carlo_ev(pop, kChange, 100000);
    const double band = 3.0 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 1e5);
    CHECK(std::abs(mass_at(e, 0.0) - 1.0 / 3.0) <= band);
    CHECK(std::abs(mass_at(e, 1.0) - 1.0 / 3.0) <= band);
    CHECK(std::abs(mass_at(e, 2.0) - 1.0 / 3.0) <= band);
    CHECK(e.full + e.partial + e.none == e.n);

    auto again = monte_carlo_ev(pop, kChange, 100000);
    REQUIRE(again.atoms.size() == e.atoms.size());
    for (std::size_t i = 0; i < e.atoms.size(); ++i) {
        CHECK(again.atoms[i].value == e.atoms[i].value);
        CHECK(again.atoms[i].mass == e.atoms[i].mass);
    }

    auto inf = Population::apt(example_utility(), std::vector<double>(10, kInf));
    auto ei = monte_carlo_ev(inf, kChange, 1);
    REQUIRE(ei.atoms.size() == 1);
    CHECK(ei.atoms[0].value == doctest::Approx(1.0));

    auto low = Population::apt(example_utility(), std::vector<double>{0.5});
    auto el = monte_carlo_ev(low, kChange, 1);
    REQUIRE(el.atoms.size() == 1);
    CHECK(el.atoms[0].value == 0.0);
    CHECK(el.atoms[0].mass == 1.0);

    CHECK_THROWS_AS(monte_carlo_ev(Population::qrum(PiecewiseLinear::from_knots({{0, 3}, {1, 0}})), kChange, 10),
                    DomainError);
}

TEST_CASE("split streams are reproducible and distinct") {
    SplitStream a(1, 0), b(1, 0), c(1, 1);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    SplitStream d(1, 0);
    CHECK(d.next() != c.next());
}

TEST_CASE("property: forward simulation matches the closed form") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        auto k = random_apt_case(rng);
        auto ds = forward_choice_prob(k.pop, k.grid(), k.inject);
        const auto& g = ds.grid();
        for (std::size_t j = 0; j < g.incomes().size(); ++j)
            for (std::size_t r = 0; r < g.column_size(j); ++r) CHECK(ds.at(r, j) == k.q(g.prices()[r], j));
    }
}
