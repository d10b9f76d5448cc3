#include "rdsec/info.hpp"

#include <cmath>

#include "doctest.h"
#include "rdsec/rng.hpp"
#include "test_util.hpp"

using namespace rdsec;

namespace {

JointPmf xbw_from_channels(const Pmf& src, const Channel& cb, const Channel& cw) {
    return extend_with_channel(push_through(src, cb), {0}, cw);
}

}  // namespace

TEST_CASE("entropy examples") {
    CHECK(entropy(Pmf::point_mass(4, 2)) == 0.0);
    CHECK(entropy(Pmf::uniform(4)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(entropy(Pmf::bernoulli(0.11)) == doctest::Approx(0.4999157).epsilon(1e-6));
}

TEST_CASE("binary entropy examples and range check") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(binary_entropy(0.04) == doctest::Approx(0.2422922).epsilon(1e-6));
    CHECK_THROWS_AS(binary_entropy(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(binary_entropy(1.01), std::invalid_argument);
}

TEST_CASE("binary convolve examples") {
    CHECK(binary_convolve(0.3, 0.0) == doctest::Approx(0.3));
    CHECK(binary_convolve(0.3, 0.5) == doctest::Approx(0.5));
    CHECK(binary_convolve(0.2, 0.1) == doctest::Approx(0.26).epsilon(1e-14));
    CHECK_THROWS_AS(binary_convolve(1.2, 0.1), std::invalid_argument);
}

TEST_CASE("mutual information examples") {
    // Independent pair.
    JointPmf indep = push_through(Pmf::bernoulli(0.3), Channel(Alphabet(2), {Pmf::bernoulli(0.6), Pmf::bernoulli(0.6)}));
    CHECK(mutual_information(indep, {0}, {1}) == doctest::Approx(0.0).epsilon(1e-12));

    // Duplicated coordinate: I(X;X) = H(X).
    JointPmf dup = push_through(Pmf::bernoulli(0.3), Channel::identity(2));
    CHECK(mutual_information(dup, {0}, {1}) == doctest::Approx(entropy(Pmf::bernoulli(0.3))).epsilon(1e-12));

    // BEC side information at p = 1/2: I(X;B) = (1-alpha) h(p) = 0.6.
    JointPmf xb = push_through(Pmf::bernoulli(0.5), Channel::bec(0.4));
    CHECK(mutual_information(xb, {0}, {1}) == doctest::Approx(0.6).epsilon(1e-12));

    CHECK_THROWS_AS(mutual_information(xb, {0}, {0}), std::invalid_argument);
}

TEST_CASE("conditional mutual information examples") {
    CounterRng rng(21, RngStream::Search);
    // C independent of (A,B), A independent of B.
    {
        Pmf pa = testutil::random_pmf(rng, 2);
        Pmf pb = testutil::random_pmf(rng, 3);
        Pmf pc = testutil::random_pmf(rng, 2);
        std::vector<double> cells;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 2; ++c) cells.push_back(pa[a] * pb[b] * pc[c]);
        JointPmf j({Alphabet(2), Alphabet(3), Alphabet(2)}, cells);
        CHECK(conditional_mutual_information(j, {0}, {1}, {2}) == doctest::Approx(0.0).epsilon(1e-12));
    }
    // C constant: equals unconditional MI.
    {
        JointPmf ab = testutil::random_joint(rng, {3, 3});
        std::vector<double> cells(ab.probs());
        JointPmf j({Alphabet(3), Alphabet(3), Alphabet(1)}, cells);
        CHECK(conditional_mutual_information(j, {0}, {1}, {2}) ==
              doctest::Approx(mutual_information(ab, {0}, {1})).epsilon(1e-11));
    }
    // Markov chain A - C - B.
    {
        Pmf pc = testutil::random_pmf(rng, 3);
        Channel a_given_c = testutil::random_channel(rng, 3, 2);
        Channel b_given_c = testutil::random_channel(rng, 3, 2);
        JointPmf ca = push_through(pc, a_given_c);              // (C, A)
        JointPmf cab = extend_with_channel(ca, {0}, b_given_c);  // (C, A, B)
        CHECK(conditional_mutual_information(cab, {1}, {2}, {0}) <= 1e-10);
    }
}

TEST_CASE("chain rule holds on random joints") {
    CounterRng rng(22, RngStream::Search);
    for (int t = 0; t < 100; ++t) {
        JointPmf j = testutil::random_joint(rng, {2, 3, 2});
        double lhs = mutual_information(j, {0}, {1, 2});
        double rhs = mutual_information(j, {0}, {2}) + conditional_mutual_information(j, {0}, {1}, {2});
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("entropy bounds and nonnegativity") {
    CounterRng rng(23, RngStream::Search);
    for (int t = 0; t < 100; ++t) {
        JointPmf j = testutil::random_joint(rng, {3, 4});
        CHECK(entropy(j, {0}) >= 0.0);
        CHECK(entropy(j, {0}) <= std::log2(3.0) + 1e-12);
        CHECK(entropy(j, {1}) <= 2.0 + 1e-12);
        CHECK(mutual_information(j, {0}, {1}) >= 0.0);
    }
}

TEST_CASE("data processing along V - X - B") {
    CounterRng rng(24, RngStream::Search);
    for (int t = 0; t < 100; ++t) {
        Pmf px = testutil::random_pmf(rng, 2);
        Channel cb = testutil::random_channel(rng, 2, 3);
        Channel cv = testutil::random_channel(rng, 2, 3);
        JointPmf xb = push_through(px, cb);
        JointPmf xbv = extend_with_channel(xb, {0}, cv);
        CHECK(mutual_information(xbv, {2}, {1}) <= mutual_information(xbv, {0}, {1}) + 1e-11);
    }
}

TEST_CASE("BEC side information gives H(X|B) = alpha h(p) exactly") {
    for (double p : {0.11, 0.3, 0.5}) {
        for (double alpha : {0.1, 0.4, 0.9}) {
            JointPmf xb = push_through(Pmf::bernoulli(p), Channel::bec(alpha));
            double hxb = entropy(xb, {0, 1}) - entropy(xb, {1});
            CHECK(hxb == doctest::Approx(alpha * binary_entropy(p)).epsilon(1e-11));
        }
    }
}

TEST_CASE("more capable verdicts") {
    Pmf src = Pmf::bernoulli(0.5);
    CHECK(is_more_capable(src, Channel::identity(2), Channel::bsc(0.1)).verdict == CapabilityVerdict::StrictYes);
    CHECK(is_more_capable(src, Channel::bec(0.4), Channel::bsc(0.04)).verdict == CapabilityVerdict::StrictNo);
    CHECK(is_more_capable(src, Channel::bec(0.4), Channel::bsc(0.1)).verdict == CapabilityVerdict::StrictYes);
    CHECK(is_more_capable(src, Channel::bsc(0.1), Channel::bsc(0.1)).verdict == CapabilityVerdict::WithinMargin);

    CapabilityReport rep = is_more_capable(src, Channel::bec(0.4), Channel::bsc(0.1));
    CHECK(rep.i_x_b == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(rep.i_x_w == doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-12));
}

TEST_CASE("less noisy falsifier finds the equal-channel violation") {
    LessNoisyReport r = less_noisy_falsifier(Pmf::bernoulli(0.5), Channel::bsc(0.2), Channel::bsc(0.2), 2, 10, 1);
    CHECK(r.counterexample_found);
    CHECK(r.witness.has_value());
    CHECK(r.witness_i_v_b <= r.witness_i_v_w + 1e-12);
    CHECK(r.witness_i_v_b > 1e-9);
}

TEST_CASE("less noisy falsifier finds no counterexample in the degraded case") {
    LessNoisyReport r =
        less_noisy_falsifier(Pmf::bernoulli(0.5), Channel::identity(2), Channel::bsc(0.25), 2, 10000, 2);
    CHECK_FALSE(r.counterexample_found);
    CHECK(r.trials_run == 10000);
}

TEST_CASE("less noisy falsifier finds V=X violation when W is more capable") {
    LessNoisyReport r = less_noisy_falsifier(Pmf::bernoulli(0.5), Channel::bec(0.4), Channel::bsc(0.04), 2, 100, 3);
    CHECK(r.counterexample_found);
}

TEST_CASE("markov degradedness check") {
    // B = X: trivially Markov X - B - W.
    JointPmf degraded = xbw_from_channels(Pmf::bernoulli(0.5), Channel::identity(2), Channel::bsc(0.25));
    CHECK(is_markov_x_b_w(degraded));
    // BEC-BSC side information is not degraded.
    JointPmf becbsc = xbw_from_channels(Pmf::bernoulli(0.5), Channel::bec(0.4), Channel::bsc(0.1));
    CHECK_FALSE(is_markov_x_b_w(becbsc));
}
