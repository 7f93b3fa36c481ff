#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aptwelfare/axioms.hpp"
#include "aptwelfare/errors.hpp"
#include "aptwelfare/simulate.hpp"
#include "support/datasets.hpp"
#include "support/generators.hpp"

using namespace aptw;
using namespace aptw::testing;

namespace {

ChoiceDataset columns(double step, std::vector<double> incomes, std::vector<std::vector<double>> cols) {
    return ChoiceDataset(PriceGrid::uniform(step, std::move(incomes)), std::move(cols));
}

bool has_cell(const Witness& w, double p, double y) {
    for (const auto& c : w.cells)
        if (same_money(c.price, p) && same_money(c.income, y)) return true;
    return false;
}

}  // namespace

TEST_CASE("the k = 3 dataset passes everything") {
    auto ds = k3_dataset();
    auto apt = check_apt(ds);
    REQUIRE(apt.size() == 6);
    for (const auto& r : apt) CHECK_MESSAGE(r.verdict == Verdict::Pass, to_string(r.axiom));
    auto q = check_qrum(ds);
    REQUIRE(q.size() == 3);
    CHECK(all_passed(q));
}

TEST_CASE("A(ii): increasing column") {
    auto ds = columns(1.0, {10.0}, {{1, 0.2, 0.3, 0, 0, 0, 0, 0, 0, 0, 0}});
    auto r = check_axiom_a_ii(ds);
    CHECK(r.verdict == Verdict::Fail);
    REQUIRE(r.witnesses.size() >= 1);
    CHECK(has_cell(r.witnesses[0], 1.0, 10.0));
    CHECK(has_cell(r.witnesses[0], 2.0, 10.0));
    CHECK(witness_replays(ds, AxiomId::A_ii, r.witnesses[0]));
}

TEST_CASE("A(i): diagonal increase") {
    std::vector<double> c10(11, 0.0), c11(12, 0.0);
    c10[0] = 1, c10[1] = 0.5;
    c11[0] = 1, c11[1] = 0.7, c11[2] = 0.6;
    auto ds = columns(1.0, {10.0, 11.0}, {c10, c11});
    auto r = check_axiom_a_i(ds);
    CHECK(r.verdict == Verdict::Fail);
    bool found = false;
    for (const auto& w : r.witnesses) found = found || (has_cell(w, 1.0, 10.0) && has_cell(w, 2.0, 11.0));
    CHECK(found);
    for (const auto& w : r.witnesses) CHECK(witness_replays(ds, AxiomId::A_i, w));
}

TEST_CASE("B: equal positive shares across incomes") {
    auto make = [](double at20) {
        std::vector<double> c10(11, 0.0), c20(21, 0.0);
        c10[0] = c20[0] = 1.0;
        c10[1] = 2.0 / 3.0;
        c20[1] = at20;
        return columns(1.0, {10.0, 20.0}, {c10, c20});
    };
    CHECK(check_axiom_b(make(2.0 / 3.0)).verdict == Verdict::Pass);
    CHECK(check_axiom_b(make(0.0)).verdict == Verdict::Pass);
    auto bad = make(0.5);
    auto r = check_axiom_b(bad);
    CHECK(r.verdict == Verdict::Fail);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(has_cell(r.witnesses[0], 1.0, 10.0));
    CHECK(has_cell(r.witnesses[0], 1.0, 20.0));
    CHECK(witness_replays(bad, AxiomId::B, r.witnesses[0]));
}

TEST_CASE("C: a zero in every column") {
    CHECK(check_axiom_c(k3_dataset()).verdict == Verdict::Pass);
    CHECK(check_axiom_c(column_dataset(1.0, 5.0, [](double) { return 0.0; })).verdict == Verdict::Pass);
    auto bad = column_dataset(1.0, 5.0, [](double) { return 0.1; });
    auto r = check_axiom_c(bad);
    CHECK(r.verdict == Verdict::Fail);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(has_cell(r.witnesses[0], 5.0, 5.0));
}

TEST_CASE("D: finite-grid reading") {
    auto stepped = columns(1.0, {6.0}, {{1, 0.5, 0.2, 0, 0, 0, 0}});
    auto warn = check_axiom_d(stepped);
    CHECK(warn.verdict == Verdict::Warn);
    CHECK(warn.passed());
    RunConfig exact;
    exact.exact_grid = true;
    auto fail = check_axiom_d(stepped, exact);
    CHECK(fail.verdict == Verdict::Fail);
    REQUIRE_FALSE(fail.witnesses.empty());
    CHECK(has_cell(fail.witnesses[0], 2.0, 6.0));
    CHECK(witness_replays(stepped, AxiomId::D, fail.witnesses[0], exact));

    auto soft = columns(1.0, {6.0}, {{1, 0.5, 0.04, 0, 0, 0, 0}});
    CHECK(check_axiom_d(soft, exact).verdict == Verdict::Pass);
    CHECK(check_axiom_d(column_dataset(1.0, 4.0, [](double) { return 0.0; })).verdict == Verdict::Pass);
    CHECK(check_axiom_d(k3_dataset()).verdict == Verdict::Pass);
}

TEST_CASE("E: all or nothing at price zero") {
    CHECK(check_axiom_e(k3_dataset()).verdict == Verdict::Pass);
    CHECK(check_axiom_e(column_dataset(1.0, 4.0, [](double) { return 0.0; })).verdict == Verdict::Pass);
    auto bad = with_cell(k3_dataset(), 0.0, 10.0, 0.5);
    CHECK(check_axiom_e(bad).verdict == Verdict::Fail);

    auto e_only = with_cell(k3_dataset(), 0.0, 10.0, 0.999);
    auto all = check_apt(e_only);
    int fails = 0;
    for (const auto& r : all) fails += !r.passed();
    CHECK(fails == 1);
    CHECK_FALSE(all[5].passed());
    CHECK(all[5].axiom == AxiomId::E);
    CHECK_FALSE(all_passed(all));
}

TEST_CASE("QRUM axioms") {
    auto step = column_dataset(0.01, 5.0, [](double p) { return p < 2.0 ? 0.4 : 0.0; });
    auto q = check_qrum(step);
    CHECK(q[1].axiom == AxiomId::B_QRUM);
    CHECK_FALSE(q[1].passed());

    auto low = with_cell(k3_dataset(), 0.0, 10.0, 0.9);
    auto ql = check_qrum(low);
    CHECK(ql[2].axiom == AxiomId::C_QRUM);
    CHECK_FALSE(ql[2].passed());
    for (const auto& w : ql[2].witnesses) CHECK(witness_replays(low, AxiomId::C_QRUM, w));

    auto two = k3_dataset(0.01, {5.0, 10.0});
    CHECK(all_passed(check_qrum(two)));
    auto varied = with_cell(two, 1.0, 10.0, 0.6);
    try {
        check_qrum(varied);
        FAIL("expected income variance");
    } catch (const IncomeVarianceError& e) {
        CHECK(e.price == doctest::Approx(1.0));
    }
    CHECK(income_invariant_curve(two, 1e-9).size() == two.grid().prices().size());
}

TEST_CASE("property: simulated APT data pass and failures always replay") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        auto k = random_apt_case(rng);
        auto ds = forward_choice_prob(k.pop, k.grid(), k.inject);
        CHECK(all_passed(check_apt(ds)));
        const auto& g = ds.grid();
        const std::size_t j = static_cast<std::size_t>(rng.integer(0, static_cast<int>(g.incomes().size()) - 1));
        const std::size_t r = static_cast<std::size_t>(rng.integer(0, static_cast<int>(g.column_size(j)) - 1));
        auto bad = with_cell(ds, g.prices()[r], g.incomes()[j], rng.uniform(0.0, 1.0));
        for (const auto& rep : check_apt(bad)) {
            CHECK((rep.verdict == Verdict::Pass) == rep.witnesses.empty());
            if (rep.verdict == Verdict::Fail)
                for (const auto& w : rep.witnesses) CHECK(witness_replays(bad, rep.axiom, w));
        }
    }
}
