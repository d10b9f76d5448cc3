#include "rdsec/becbsc.hpp"

#include <cmath>

#include "doctest.h"
#include "rdsec/info.hpp"
#include "rdsec/rng.hpp"

using namespace rdsec;

TEST_CASE("rate floor") {
    CHECK(rate_floor({0.0, 0.4, 0.1}) == 0.0);
    CHECK(rate_floor({0.5, 0.4, 0.1}) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(rate_floor({0.11, 0.4, 0.1}) == doctest::Approx(0.4 * binary_entropy(0.11)).epsilon(1e-12));
    CHECK(rate_floor({0.11, 0.4, 0.1}) == doctest::Approx(0.200).epsilon(2e-3));
}

TEST_CASE("outer distortion bound") {
    CHECK(outer_dw({0.3, 0.4, 0.0}) == 0.0);
    CHECK(outer_dw({0.5, 0.4, 0.17}) == doctest::Approx(0.17).epsilon(1e-12));
    CHECK(outer_dw({0.01, 0.4, 0.1}) == doctest::Approx(0.01).epsilon(1e-12));
    // Equals min(p, 1-p, beta) across parameters.
    CounterRng rng(31, RngStream::Search);
    for (int t = 0; t < 200; ++t) {
        BecBscParams q{rng.next_double(), rng.next_double(), 0.5 * rng.next_double()};
        CHECK(outer_dw(q) == doctest::Approx(std::min({q.p, 1 - q.p, q.beta})).epsilon(1e-9));
    }
}

TEST_CASE("capability crossover") {
    CHECK(capability_crossover(0.0, 0.1).empty());
    CHECK(capability_crossover(0.4, 0.1).empty());
    std::vector<double> roots = capability_crossover(0.4, 0.04);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] < 0.5);
    CHECK(roots[1] > 0.5);
    CHECK(roots[0] + roots[1] == doctest::Approx(1.0).epsilon(1e-8));
    // The gap really does change sign there.
    CHECK(std::abs(capability_gap({roots[0], 0.4, 0.04})) < 1e-8);
}

TEST_CASE("theorem-4 optimizer in the B-more-capable regime hits the outer bound") {
    ThreeAtomSolution s = solve_theorem4({0.5, 0.4, 0.1}, 32, 120);
    CHECK(s.feasible);
    CHECK(s.objective == doctest::Approx(0.1).epsilon(1e-9));
    // Constraint slack at the single atom: (1-a) h(p) - h(p*b) + h(b) >= 0.
    CHECK(capability_gap({0.5, 0.4, 0.1}) > 0.0);
}

TEST_CASE("theorem-4 optimizer degenerate source") {
    ThreeAtomSolution s = solve_theorem4({0.0, 0.4, 0.1}, 16, 40);
    CHECK(s.objective <= 1e-9);
}

TEST_CASE("theorem-4 optimizer strictly interior when W is more capable") {
    ThreeAtomSolution s = solve_theorem4({0.5, 0.4, 0.04}, 48, 200);
    CHECK(s.feasible);
    CHECK(s.objective > 0.0);
    CHECK(s.objective < 0.04);
    // Prototype of the optimum found by two independent searches.
    CHECK(s.objective == doctest::Approx(0.0341).epsilon(5e-3));
}

TEST_CASE("returned solutions satisfy their constraints tightly") {
    CounterRng rng(32, RngStream::Search);
    for (int t = 0; t < 10; ++t) {
        BecBscParams q{0.02 + 0.96 * rng.next_double(), rng.next_double(), 0.5 * rng.next_double()};
        ThreeAtomSolution s = solve_theorem4(q, 24, 80);
        double usum = s.u[0] + s.u[1] + s.u[2];
        double mean = s.u[0] * s.delta[0] + s.u[1] * s.delta[1] + s.u[2] * s.delta[2];
        CHECK(std::abs(usum - 1.0) <= 1e-9);
        CHECK(std::abs(mean - (1.0 - q.p)) <= 1e-9);
        CHECK(s.constraint_slack >= -1e-9);
        // Ordering chain.
        CHECK(s.objective >= -1e-12);
        CHECK(s.objective <= outer_dw(q) + 1e-9);
        CHECK(outer_dw(q) <= std::min({q.p, 1 - q.p, q.beta}) + 1e-9);
    }
}

TEST_CASE("objective equals outer bound whenever the capability gap is clearly positive") {
    CounterRng rng(33, RngStream::Search);
    int checked = 0;
    for (int t = 0; t < 40 && checked < 12; ++t) {
        BecBscParams q{0.05 + 0.9 * rng.next_double(), rng.next_double(), 0.5 * rng.next_double()};
        if (capability_gap(q) <= 1e-6) continue;
        ++checked;
        ThreeAtomSolution s = solve_theorem4(q, 16, 60);
        CHECK(s.objective == doctest::Approx(outer_dw(q)).epsilon(1e-6));
    }
    CHECK(checked > 0);
}

TEST_CASE("objective is symmetric in p") {
    for (double p : {0.2, 0.35, 0.45}) {
        ThreeAtomSolution a = solve_theorem4({p, 0.4, 0.04}, 32, 120);
        ThreeAtomSolution b = solve_theorem4({1.0 - p, 0.4, 0.04}, 32, 120);
        CHECK(a.objective == doctest::Approx(b.objective).epsilon(5e-4));
    }
}

TEST_CASE("solution dominates the single-atom baseline when that baseline is feasible") {
    CounterRng rng(34, RngStream::Search);
    for (int t = 0; t < 8; ++t) {
        BecBscParams q{0.05 + 0.9 * rng.next_double(), rng.next_double(), 0.5 * rng.next_double()};
        if (capability_gap(q) < 0.0) continue;
        ThreeAtomSolution s = solve_theorem4(q, 16, 60);
        CHECK(s.objective >= std::min({q.p, 1 - q.p, q.beta}) - 1e-9);
    }
}

TEST_CASE("sweep regimes") {
    // Always B-more-capable at beta = 0.1.
    std::vector<SweepRow> rows = sweep_curve(0.4, 0.1, {0.0, 0.25, 0.5, 0.75, 1.0}, 24, 80);
    for (const auto& r : rows) {
        CHECK(r.regime == Regime::BMoreCapable);
        CHECK(r.inner_dw == doctest::Approx(r.outer_dw).epsilon(1e-6));
    }
    // Both regimes at beta = 0.04.
    std::vector<double> roots = capability_crossover(0.4, 0.04);
    REQUIRE(roots.size() == 2);
    std::vector<SweepRow> rows4 =
        sweep_curve(0.4, 0.04, {0.01, 0.5, 0.99, roots[0]}, 24, 80);
    CHECK(rows4[0].regime == Regime::BMoreCapable);
    CHECK(rows4[1].regime == Regime::WMoreCapable);
    CHECK(rows4[2].regime == Regime::BMoreCapable);
    CHECK(rows4[3].regime == Regime::Boundary);
    CHECK(rows4[1].inner_dw > 0.0);
    CHECK(rows4[1].inner_dw < rows4[1].outer_dw);
}

TEST_CASE("becbsc joint marginals") {
    JointPmf j = becbsc_joint({0.5, 0.4, 0.1});
    CHECK(j.num_axes() == 3);
    JointPmf mb = marginal(j, {1});
    CHECK(mb.at_flat(2) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(mutual_information(j, {0}, {1}) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(mutual_information(j, {0}, {2}) == doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-12));
}
