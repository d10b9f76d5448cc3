#include "rdsec/region.hpp"

#include <cmath>

#include "doctest.h"
#include "rdsec/becbsc.hpp"
#include "rdsec/info.hpp"
#include "rdsec/rng.hpp"
#include "test_util.hpp"

using namespace rdsec;

namespace {

JointPmf xbw_joint(const Pmf& src, const Channel& cb, const Channel& cw) {
    return extend_with_channel(push_through(src, cb), {0}, cw);
}

SystemSpec becbsc_spec(double p, double alpha, double beta) {
    return SystemSpec(becbsc_joint({p, alpha, beta}), DistortionMeasure::hamming(2),
                      DistortionMeasure::hamming(2));
}

Channel constant_channel(int in) {
    std::vector<double> rows(static_cast<std::size_t>(in), 1.0);
    return Channel(Alphabet(in), Alphabet(1), std::move(rows));
}

}  // namespace

TEST_CASE("evaluate_inner with perfect side information needs no rate") {
    SystemSpec spec(xbw_joint(Pmf::bernoulli(0.5), Channel::identity(2), Channel::bsc(0.2)),
                    DistortionMeasure::hamming(2), DistortionMeasure::hamming(2));
    AuxScheme aux{Channel::identity(2), constant_channel(2), {0, 1, 0, 1}, {}};
    // phi(v, b) = v.
    aux.phi = {0, 0, 1, 1};
    InnerEvaluation e = evaluate_inner(spec, aux);
    CHECK(e.r_min == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(e.db_min == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("evaluate_inner with V independent of X") {
    SystemSpec spec = becbsc_spec(0.3, 0.4, 0.1);
    Channel v_const = constant_channel(2);
    AuxScheme aux{v_const, Channel::identity(1), pointwise_optimal_phi(spec, v_const), {}};
    InnerEvaluation e = evaluate_inner(spec, aux);
    CHECK(e.r_min == doctest::Approx(0.0).epsilon(1e-10));
    // Best reconstruction from B alone: right when B is unerased, else the
    // majority symbol; P(X=1) = 0.3 so phi(e) = 0 and Db = alpha * p.
    CHECK(e.db_min == doctest::Approx(0.4 * 0.3).epsilon(1e-10));
}

TEST_CASE("evaluate_inner on the worked example with V = X") {
    SystemSpec spec = becbsc_spec(0.5, 0.4, 0.1);
    AuxScheme aux{Channel::identity(2), constant_channel(2), {}, {}};
    aux.phi = pointwise_optimal_phi(spec, aux.v_given_x);
    InnerEvaluation e = evaluate_inner(spec, aux);
    CHECK(e.r_min == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(e.secrecy_slack == doctest::Approx(0.6 - (1.0 - binary_entropy(0.1))).epsilon(1e-9));
    CHECK(e.db_min == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("eavesdropper distortion examples") {
    DistortionMeasure ham = DistortionMeasure::hamming(2);
    // U = X: nothing left to guess.
    {
        JointPmf xw = push_through(Pmf::bernoulli(0.35), Channel::bsc(0.1));
        // (U, W, X) with U = X.
        std::vector<double> cells(2 * 2 * 2, 0.0);
        for (int x = 0; x < 2; ++x)
            for (int w = 0; w < 2; ++w)
                cells[static_cast<std::size_t>(x) * 4 + static_cast<std::size_t>(w) * 2 + x] =
                    xw.at({x, w});
        JointPmf uwx({Alphabet(2), Alphabet(2), Alphabet(2)}, cells);
        CHECK(eavesdropper_best_distortion(uwx, ham) == doctest::Approx(0.0).epsilon(1e-12));
    }
    // U constant, W independent: constant guess.
    {
        double p = 0.3;
        std::vector<double> cells;
        for (int w = 0; w < 2; ++w)
            for (int x = 0; x < 2; ++x) cells.push_back(0.5 * (x == 1 ? p : 1 - p));
        JointPmf uwx({Alphabet(1), Alphabet(2), Alphabet(2)}, cells);
        CHECK(eavesdropper_best_distortion(uwx, ham) == doctest::Approx(0.3).epsilon(1e-12));
    }
    // U constant, Bern(0.2) through BSC(0.1).
    {
        JointPmf xw = push_through(Pmf::bernoulli(0.2), Channel::bsc(0.1));
        std::vector<double> cells;
        for (int w = 0; w < 2; ++w)
            for (int x = 0; x < 2; ++x) cells.push_back(xw.at({x, w}));
        JointPmf uwx({Alphabet(1), Alphabet(2), Alphabet(2)}, cells);
        CHECK(eavesdropper_best_distortion(uwx, ham) == doctest::Approx(0.10).epsilon(1e-12));
    }
}

TEST_CASE("evaluate_outer examples") {
    DistortionMeasure ham = DistortionMeasure::hamming(2);
    // W = X.
    {
        SystemSpec spec(xbw_joint(Pmf::bernoulli(0.4), Channel::bec(0.3), Channel::identity(2)), ham, ham);
        OuterEvaluation e = evaluate_outer(spec, Channel::identity(2), {0, 0, 0, 1, 1, 1});
        CHECK(e.dw_cap == doctest::Approx(0.0).epsilon(1e-12));
    }
    // W independent.
    {
        Channel w_indep(Alphabet(2), {Pmf::bernoulli(0.5), Pmf::bernoulli(0.5)});
        SystemSpec spec(xbw_joint(Pmf::bernoulli(0.3), Channel::bec(0.3), w_indep), ham, ham);
        OuterEvaluation e = evaluate_outer(spec, Channel::identity(2), {0, 0, 0, 1, 1, 1});
        CHECK(e.dw_cap == doctest::Approx(0.3).epsilon(1e-12));
    }
    // BSC(0.04) at p = 1/2.
    {
        SystemSpec spec = becbsc_spec(0.5, 0.4, 0.04);
        OuterEvaluation e = evaluate_outer(spec, Channel::identity(2), {0, 0, 0, 1, 1, 1});
        CHECK(e.dw_cap == doctest::Approx(0.04).epsilon(1e-12));
    }
}

TEST_CASE("pointwise-optimal phi beats every enumerated phi") {
    SystemSpec spec = becbsc_spec(0.35, 0.4, 0.1);
    CounterRng rng(41, RngStream::Search);
    Channel vchan = testutil::random_channel(rng, 2, 2);
    AuxScheme aux{vchan, constant_channel(2), pointwise_optimal_phi(spec, vchan), {}};
    const double best_db = evaluate_inner(spec, aux).db_min;
    // All 2^(|V||B|) = 64 maps.
    for (int code = 0; code < 64; ++code) {
        std::vector<int> phi(6);
        int c = code;
        for (auto& y : phi) {
            y = c & 1;
            c >>= 1;
        }
        AuxScheme other{vchan, constant_channel(2), phi, {}};
        CHECK(best_db <= evaluate_inner(spec, other).db_min + 1e-12);
    }
}

TEST_CASE("eavesdropper distortion is monotone under refining U") {
    CounterRng rng(42, RngStream::Search);
    DistortionMeasure ham = DistortionMeasure::hamming(2);
    for (int t = 0; t < 50; ++t) {
        // (U', W, X) joint; U = merge of U' symbols {0,1} -> 0, {2} -> 1.
        JointPmf fine = testutil::random_joint(rng, {3, 2, 2});
        std::vector<double> merged(2 * 2 * 2, 0.0);
        for (int u = 0; u < 3; ++u)
            for (int w = 0; w < 2; ++w)
                for (int x = 0; x < 2; ++x)
                    merged[static_cast<std::size_t>(u < 2 ? 0 : 1) * 4 + static_cast<std::size_t>(w) * 2 + x] +=
                        fine.at({u, w, x});
        JointPmf coarse({Alphabet(2), Alphabet(2), Alphabet(2)}, merged);
        CHECK(eavesdropper_best_distortion(fine, ham) <= eavesdropper_best_distortion(coarse, ham) + 1e-12);
    }
}

TEST_CASE("with constant U the secrecy slack reduces to I(V;B) - I(V;W)") {
    SystemSpec spec = becbsc_spec(0.5, 0.4, 0.1);
    CounterRng rng(43, RngStream::Search);
    for (int t = 0; t < 30; ++t) {
        Channel vchan = testutil::random_channel(rng, 2, 3);
        AuxScheme aux{vchan, constant_channel(3), pointwise_optimal_phi(spec, vchan), {}};
        InnerEvaluation e = evaluate_inner(spec, aux);
        JointPmf j = scheme_joint(spec, aux);
        const double direct = mutual_information(j, {3}, {1}) - mutual_information(j, {3}, {2});
        CHECK(e.secrecy_slack == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("optimizer reaches the outer cap when B = X") {
    DistortionMeasure ham = DistortionMeasure::hamming(2);
    SystemSpec spec(xbw_joint(Pmf::bernoulli(0.5), Channel::identity(2), Channel::bsc(0.25)), ham, ham);
    OptimizeOptions opts;
    opts.card_u = 1;
    opts.card_v = 2;
    opts.grid_resolution = 4;
    InnerRegionResult r = optimize_inner(spec, opts);
    REQUIRE(r.feasible);
    OuterEvaluation outer = evaluate_outer(spec, Channel::identity(2), {0, 0, 1, 1});
    double max_dw = 0.0;
    for (const auto& f : r.frontier) max_dw = std::max(max_dw, f.dw);
    CHECK(max_dw == doctest::Approx(outer.dw_cap).epsilon(1e-9));
}

TEST_CASE("identical side information leaves no feasible scheme") {
    // B = W = BSC(0.1) of X, jointly identical (not just equal marginals).
    Pmf src = Pmf::bernoulli(0.5);
    std::vector<double> cells(2 * 2 * 2, 0.0);
    JointPmf xw = push_through(src, Channel::bsc(0.1));
    for (int x = 0; x < 2; ++x)
        for (int w = 0; w < 2; ++w)
            cells[static_cast<std::size_t>(x) * 4 + static_cast<std::size_t>(w) * 2 + w] = xw.at({x, w});
    DistortionMeasure ham = DistortionMeasure::hamming(2);
    SystemSpec spec(JointPmf({Alphabet(2), Alphabet(2), Alphabet(2)}, cells), ham, ham);

    OptimizeOptions opts;
    opts.card_u = 2;
    opts.card_v = 2;
    opts.grid_resolution = 4;
    InnerRegionResult r = optimize_inner(spec, opts);
    CHECK_FALSE(r.feasible);
    CHECK(r.frontier.empty());
    CHECK_FALSE(r.diagnostic.empty());

    LosslessInnerResult l = lossless_inner(spec, 2, 8);
    CHECK_FALSE(l.feasible);
}

TEST_CASE("optimizer recovers the worked-example distortion with a binary V") {
    SystemSpec spec = becbsc_spec(0.5, 0.4, 0.1);
    OptimizeOptions opts;
    opts.card_u = 1;
    opts.card_v = 2;
    opts.grid_resolution = 4;
    InnerRegionResult r = optimize_inner(spec, opts);
    REQUIRE(r.feasible);
    double max_dw = 0.0;
    for (const auto& f : r.frontier) max_dw = std::max(max_dw, f.dw);
    CHECK(max_dw == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("frontier respects inner-outer ordering and the Wyner-Ziv floor") {
    SystemSpec spec = becbsc_spec(0.5, 0.4, 0.1);
    OptimizeOptions opts;
    opts.card_u = 2;
    opts.card_v = 2;
    opts.grid_resolution = 4;
    InnerRegionResult r = optimize_inner(spec, opts);
    REQUIRE(r.feasible);
    OuterEvaluation outer = evaluate_outer(spec, Channel::identity(2), {0, 0, 0, 1, 1, 1});

    // Wyner-Ziv minimum over the same V lattice (any V, U ignored).
    double wz_min = 1e300;
    for (int a = 0; a <= 4; ++a) {
        for (int b = 0; b <= 4; ++b) {
            Channel vchan(Alphabet(2), Alphabet(2),
                          {a / 4.0, 1.0 - a / 4.0, b / 4.0, 1.0 - b / 4.0});
            JointPmf j = extend_with_channel(spec.xbw, {0}, vchan);
            wz_min = std::min(wz_min, conditional_mutual_information(j, {3}, {0}, {1}));
        }
    }
    for (const auto& f : r.frontier) {
        CHECK(f.dw <= outer.dw_cap + 1e-9);
        CHECK(f.rate >= wz_min - 1e-9);
        CHECK(f.slack > 1e-9);
    }
}

TEST_CASE("lossless inner in the more-capable regime returns the outer cap with constant U") {
    SystemSpec spec = becbsc_spec(0.5, 0.4, 0.1);
    LosslessInnerResult r = lossless_inner(spec, 3, 8);
    REQUIRE(r.feasible);
    CHECK(r.r_min == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(r.dw_max == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("lossless inner matches the three-atom optimizer inside the crossover") {
    SystemSpec spec = becbsc_spec(0.5, 0.4, 0.04);
    LosslessInnerResult r = lossless_inner(spec, 3, 16, 1, 120);
    REQUIRE(r.feasible);
    CHECK(r.dw_max > 0.0);
    ThreeAtomSolution s = solve_theorem4({0.5, 0.4, 0.04}, 48, 200);
    CHECK(r.dw_max == doctest::Approx(s.objective).epsilon(2e-3));
    CHECK(r.dw_max < 0.04);
}

TEST_CASE("certify_triple") {
    InnerEvaluation e{0.4, 0.02, 0.09, 0.069};
    CHECK(certify_triple({0.45, 0.05, 0.08}, e) == TripleStatus::InnerAchievable);
    CHECK(certify_triple({0.4, 0.05, 0.08}, e) == TripleStatus::Undetermined);   // rate not above
    CHECK(certify_triple({0.45, 0.01, 0.08}, e) == TripleStatus::Undetermined);  // db below floor
    CHECK(certify_triple({0.45, 0.05, 0.10}, e) == TripleStatus::Undetermined);  // dw above max
}
