#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdsec/prob.hpp"

namespace rdsec {

// Source plus two side-information coordinates with the two distortion
// measures: the joint has coordinates (X, B, W) in that order, d_b maps
// X x Y, d_w maps X x Z.
struct SystemSpec {
    JointPmf xbw;
    DistortionMeasure db;
    DistortionMeasure dw;

    SystemSpec(JointPmf joint, DistortionMeasure d_b, DistortionMeasure d_w);

    int x_size() const { return xbw.axes()[0].size; }
    int b_size() const { return xbw.axes()[1].size; }
    int w_size() const { return xbw.axes()[2].size; }
    int y_size() const { return db.y_size(); }
    int z_size() const { return dw.y_size(); }
};

// Candidate auxiliary scheme: the cascade X -> V -> U plus the deterministic
// reconstruction maps. The induced joint has the Markov structure
// U - V - X - (B, W) by construction. z_map is advisory: the evaluator always
// recomputes the optimal eavesdropper estimate since the bound is a min.
struct AuxScheme {
    Channel v_given_x;
    Channel u_given_v;
    std::vector<int> phi;    // |V| * |B| entries -> y
    std::vector<int> z_map;  // |U| * |W| entries -> z (advisory)
};

enum class TripleStatus { InnerAchievable, OuterViolated, Undetermined };

struct RateDistortionTriple {
    double rate = 0.0;
    double db = 0.0;
    double dw = 0.0;
    TripleStatus status = TripleStatus::Undetermined;
};

struct InnerEvaluation {
    double r_min = 0.0;         // I(V;X|B)
    double db_min = 0.0;        // E[d_b(X, phi(V,B))]
    double dw_max = 0.0;        // min over z(u,w) of E[d_w(X, z(U,W))]
    double secrecy_slack = 0.0; // I(V;B|U) - I(V;W|U)
};

struct OuterEvaluation {
    double r_min = 0.0;   // I(V;X|B)
    double db_min = 0.0;  // E[d_b(X, phi(V,B))]
    double dw_cap = 0.0;  // min over z(w) of E[d_w(X, z(W))]; independent of V
};

// Joint over (X, B, W, V, U) induced by the scheme.
JointPmf scheme_joint(const SystemSpec& spec, const AuxScheme& aux);

// Evaluates the achievability quantities for one scheme. Db uses the supplied
// phi; Dw ignores z_map and optimizes the estimate pointwise.
InnerEvaluation evaluate_inner(const SystemSpec& spec, const AuxScheme& aux);

// sum_{u,w} P(u,w) min_z sum_x P(x|u,w) d_w(x,z) for a joint with coordinates
// (U, W, X). Ties in the inner argmin break toward the lowest z.
double eavesdropper_best_distortion(const JointPmf& uwx, const DistortionMeasure& dw);

// Outer-bound quantities for a given V-channel and reconstruction map.
OuterEvaluation evaluate_outer(const SystemSpec& spec, const Channel& v_given_x,
                               const std::vector<int>& phi);

// argmin_y E[d_b(X, y) | v, b] for every (v, b), ties toward the lowest y.
// Pairs with zero probability map to 0.
std::vector<int> pointwise_optimal_phi(const SystemSpec& spec, const Channel& v_given_x);

// Certifies a triple against one evaluated scheme: inner-achievable iff the
// secrecy slack exceeds the margin, rate > r_min + margin, db >= db_min and
// dw <= dw_max.
TripleStatus certify_triple(const RateDistortionTriple& t, const InnerEvaluation& eval,
                            double margin = 1e-9);

struct FrontierPoint {
    double rate;
    double db;
    double dw;
    double slack;
    AuxScheme scheme;
};

struct InnerRegionResult {
    std::vector<FrontierPoint> frontier;  // Pareto-optimal over (rate down, db down, dw up)
    bool feasible = false;
    std::string diagnostic;
};

struct OptimizeOptions {
    int card_u = 0;  // 0 -> |X| + 1
    int card_v = 0;  // 0 -> |X| + 2
    int grid_resolution = 4;
    int refine_iters = 60;
    std::uint64_t seed = 1;
    double margin = 1e-9;
    std::size_t budget = 200000;  // max channel pairs evaluated
};

// Lattice search over quantized simplices for (P_V|X, P_U|V) with phi chosen
// pointwise-optimally, followed by mass-shift refinement of the best-Dw
// scheme. Exhaustive when the lattice fits the budget, otherwise a seeded
// deterministic subsample. Cardinality defaults are heuristics, so the
// frontier is a lower estimate of the inner region.
InnerRegionResult optimize_inner(const SystemSpec& spec, const OptimizeOptions& opts = {});

struct LosslessInnerResult {
    double r_min = 0.0;   // H(X|B)
    double dw_max = 0.0;
    Channel u_given_x;
    bool feasible = false;
    std::string diagnostic;
};

// Lossless special case: V = X, optimize P_U|X only. Requires d_b to be the
// Hamming measure on Y = X.
LosslessInnerResult lossless_inner(const SystemSpec& spec, int card_u, int grid_resolution = 16,
                                   std::uint64_t seed = 1, int refine_iters = 60, double margin = 1e-9);

}  // namespace rdsec
