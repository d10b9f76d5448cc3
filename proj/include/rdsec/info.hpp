#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdsec/prob.hpp"

namespace rdsec {

// Shannon entropy in bits of the marginal on `coords`, convention 0 log 0 = 0.
double entropy(const JointPmf& j, const std::vector<std::size_t>& coords);
double entropy(const Pmf& p);

// -q log2 q - (1-q) log2 (1-q); endpoints map to 0.
double binary_entropy(double q);

// a * b = a(1-b) + (1-a)b, the crossover of cascaded symmetric channels.
double binary_convolve(double a, double b);

// I(A;B) = H(A) + H(B) - H(A,B), coordinate sets disjoint.
double mutual_information(const JointPmf& j, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b);

// I(A;B|C) via the entropy decomposition H(AC) + H(BC) - H(C) - H(ABC).
// An empty conditioning set reduces to mutual_information.
double conditional_mutual_information(const JointPmf& j, const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b,
                                      const std::vector<std::size_t>& c);

enum class CapabilityVerdict { StrictYes, StrictNo, WithinMargin };

struct CapabilityReport {
    CapabilityVerdict verdict;
    double i_x_b;
    double i_x_w;
};

// Compares I(X;B) against I(X;W) for side-information channels sharing the
// source. |difference| <= margin is surfaced as WithinMargin rather than
// rounded to either side.
CapabilityReport is_more_capable(const Pmf& source, const Channel& ch_b, const Channel& ch_w,
                                 double margin = 1e-9);

struct LessNoisyReport {
    bool counterexample_found = false;
    // V-channel with I(V;B) <= I(V;W) and I(V;B) > 0, when found.
    std::optional<Channel> witness;
    double witness_i_v_b = 0.0;
    double witness_i_v_w = 0.0;
    // V with I(V;B) ~ 0 but I(V;W) > 0 does not satisfy the definition's
    // quantifier; such channels are reported here separately.
    std::optional<Channel> zero_info_witness;
    double zero_info_i_v_w = 0.0;
    int trials_run = 0;
};

// Searches deterministic, grid and random P(V|X) candidates for a violation of
// the strictly-less-noisy ordering. A no-counterexample result is evidence,
// not a proof: the ordering quantifies over all V and finite sampling cannot
// decide it.
LessNoisyReport less_noisy_falsifier(const Pmf& source, const Channel& ch_b, const Channel& ch_w,
                                     int v_cardinality, int trials, std::uint64_t seed);

// Exact check of the sufficient degraded condition X - B - W on a joint with
// coordinates (X, B, W): true iff I(X;W|B) <= tol.
bool is_markov_x_b_w(const JointPmf& xbw, double tol = 1e-10);

}  // namespace rdsec
