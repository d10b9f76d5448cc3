#pragma once

#include <array>
#include <string>
#include <vector>

#include "rdsec/prob.hpp"

namespace rdsec {

// Binary source through a BEC to the legitimate receiver and a BSC to the
// eavesdropper: P(X=1) = p, erasure probability alpha, crossover beta.
struct BecBscParams {
    double p = 0.5;
    double alpha = 0.0;
    double beta = 0.0;

    void validate() const;
};

// A three-atom auxiliary solution: u on the simplex, delta[i] = P(X=0 | U=i).
struct ThreeAtomSolution {
    std::array<double, 3> u{1.0, 0.0, 0.0};
    std::array<double, 3> delta{0.5, 0.5, 0.5};
    double objective = 0.0;
    double constraint_slack = 0.0;
    bool feasible = false;
    std::string note;
};

enum class Regime { BMoreCapable, WMoreCapable, Boundary };

std::string regime_name(Regime r);

struct SweepRow {
    double p;
    double rate_floor_bits;
    double inner_dw;
    double outer_dw;
    Regime regime;
    ThreeAtomSolution solution;
};

// alpha * h(p): the compression rate needed for lossless recovery with the
// erased side information.
double rate_floor(const BecBscParams& params);

// Hamming MAP error of X from W alone: sum_w P(w) (1 - max_x P(x|w)).
double outer_dw(const BecBscParams& params);

// (1-alpha) h(p) - h(p*beta) + h(beta): positive iff B is strictly more
// capable than W at this p.
double capability_gap(const BecBscParams& params);

// Roots of the capability gap on (0,1), found by sign-change bisection on
// (0, 1/2] at tolerance 1e-10 and mirrored by the p <-> 1-p symmetry.
std::vector<double> capability_crossover(double alpha, double beta);

// Maximizes sum_i u_i min(delta_i, 1-delta_i, beta) over three-atom schemes
// subject to sum u = 1, sum u delta = 1 - p and the entropy constraint taken
// non-strict. Lattice search over (u1, u2, d1, d2) with d3 eliminated by the
// mean constraint, then local refinement (exact LP in u at fixed delta plus
// multi-direction coordinate descent on delta). Deterministic.
ThreeAtomSolution solve_theorem4(const BecBscParams& params, int grid_resolution = 48,
                                 int refine_iters = 200);

// One row per p: rate floor, optimized inner distortion, outer bound and the
// capability regime.
std::vector<SweepRow> sweep_curve(double alpha, double beta, const std::vector<double>& p_grid,
                                  int grid_resolution = 48, int refine_iters = 200, int threads = 0);

// Uniform grid of `count` points on [0,1] (the default 101 renders the curves
// smoothly).
std::vector<double> uniform_p_grid(int count = 101);

// The (X, B, W) joint of this example, for the generic region machinery.
// Coordinates: X in {0,1}, B in {0,1,e=2}, W in {0,1}.
JointPmf becbsc_joint(const BecBscParams& params);

}  // namespace rdsec
