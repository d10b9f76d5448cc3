#include "rdsec/becbsc.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <future>
#include <thread>

#include "rdsec/info.hpp"

namespace rdsec {

namespace {

constexpr double kFeasTol = 1e-12;  // float-noise absorption on the non-strict constraint
constexpr double kMeanTol = 1e-9;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

struct Eval {
    double objective = -1.0;
    double slack = 0.0;
    bool feasible = false;
};

double atom_objective(double d, double beta) { return std::min({d, 1.0 - d, beta}); }

// (1-alpha) h(d) - h(d * beta), the per-atom constraint contribution.
double atom_constraint(double d, const BecBscParams& q) {
    return (1.0 - q.alpha) * binary_entropy(d) - binary_entropy(binary_convolve(d, q.beta));
}

Eval evaluate(const std::array<double, 3>& u, const std::array<double, 3>& d, const BecBscParams& q) {
    Eval e;
    e.objective = 0.0;
    double con = binary_entropy(q.beta);
    for (int i = 0; i < 3; ++i) {
        e.objective += u[i] * atom_objective(d[i], q.beta);
        con += u[i] * atom_constraint(d[i], q);
    }
    e.slack = con;
    e.feasible = con >= -kFeasTol;
    return e;
}

struct Candidate {
    std::array<double, 3> u;
    std::array<double, 3> d;
    double objective;
    double slack;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.objective != b.objective) return a.objective > b.objective;
    // Deterministic tie-break so parallel and serial merges agree.
    for (int i = 0; i < 3; ++i) {
        if (a.u[i] != b.u[i]) return a.u[i] < b.u[i];
        if (a.d[i] != b.d[i]) return a.d[i] < b.d[i];
    }
    return false;
}

void offer(std::vector<Candidate>& top, std::size_t cap, const Candidate& c) {
    top.push_back(c);
    std::sort(top.begin(), top.end(), better);
    if (top.size() > cap) top.resize(cap);
}

// Exact solution of: maximize sum u_i a_i over the simplex with
// sum u_i d_i = 1-p and sum u_i c_i + h(beta) >= 0, by vertex enumeration.
struct LpResult {
    bool ok = false;
    double value = -1.0;
    std::array<double, 3> u{0, 0, 0};
};

LpResult lp_best_u(const std::array<double, 3>& d, const BecBscParams& q) {
    const double target = 1.0 - q.p;
    const double hb = binary_entropy(q.beta);
    std::array<double, 3> a{};
    std::array<double, 3> c{};
    for (int i = 0; i < 3; ++i) {
        a[i] = atom_objective(d[i], q.beta);
        c[i] = atom_constraint(d[i], q);
    }

    LpResult best;
    auto offer_u = [&](std::array<double, 3> u) {
        double s = u[0] + u[1] + u[2];
        if (s <= 0.0) return;
        for (double& x : u) x /= s;
        double mean = u[0] * d[0] + u[1] * d[1] + u[2] * d[2];
        if (std::abs(mean - target) > kMeanTol) return;
        double con = u[0] * c[0] + u[1] * c[1] + u[2] * c[2] + hb;
        if (con < -kFeasTol) return;
        double value = u[0] * a[0] + u[1] * a[1] + u[2] * a[2];
        if (!best.ok || value > best.value) {
            best.ok = true;
            best.value = value;
            best.u = u;
        }
    };

    // Point masses.
    for (int i = 0; i < 3; ++i) {
        if (std::abs(d[i] - target) <= kMeanTol) {
            std::array<double, 3> u{0, 0, 0};
            u[i] = 1.0;
            offer_u(u);
        }
    }
    // Two-atom edges: u_i from the mean equation.
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const double den = d[i] - d[j];
            if (std::abs(den) < 1e-14) continue;
            const double ui = (target - d[j]) / den;
            if (ui < -1e-11 || ui > 1.0 + 1e-11) continue;
            std::array<double, 3> u{0, 0, 0};
            u[i] = clamp01(ui);
            u[j] = 1.0 - u[i];
            offer_u(u);
        }
    }
    // Full-support vertex with the entropy constraint active: solve the 3x3
    // system [1;d;c] u = [1; 1-p; -h(beta)].
    {
        const double m[3][3] = {{1, 1, 1}, {d[0], d[1], d[2]}, {c[0], c[1], c[2]}};
        const double rhs[3] = {1.0, target, -hb};
        const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (std::abs(det) > 1e-14) {
            std::array<double, 3> u{};
            for (int col = 0; col < 3; ++col) {
                double mm[3][3];
                for (int r = 0; r < 3; ++r)
                    for (int cc = 0; cc < 3; ++cc) mm[r][cc] = (cc == col) ? rhs[r] : m[r][cc];
                const double dcol = mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
                                    mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
                                    mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
                u[col] = dcol / det;
            }
            if (u[0] >= -1e-11 && u[1] >= -1e-11 && u[2] >= -1e-11) {
                for (double& x : u) x = clamp01(x);
                offer_u(u);
            }
        }
    }
    return best;
}

// Move directions for the delta polish. Pairs and the all-atoms move matter:
// optima often sit in valleys where two deltas shift together.
const std::array<std::array<double, 3>, 10> kMoves = {{
    {1, 0, 0},
    {0, 1, 0},
    {0, 0, 1},
    {1, 1, 0},
    {1, -1, 0},
    {1, 0, 1},
    {1, 0, -1},
    {0, 1, 1},
    {0, 1, -1},
    {1, 1, 1},
}};

Candidate polish(std::array<double, 3> d, const BecBscParams& q, int refine_iters) {
    LpResult cur = lp_best_u(d, q);
    double step = 0.08;
    int rounds = 0;
    while (step > 1e-7 && rounds < refine_iters) {
        bool improved = false;
        for (const auto& mv : kMoves) {
            for (double sgn : {1.0, -1.0}) {
                std::array<double, 3> nd{};
                for (int i = 0; i < 3; ++i) nd[i] = clamp01(d[i] + sgn * step * mv[i]);
                LpResult r = lp_best_u(nd, q);
                if (r.ok && (!cur.ok || r.value > cur.value + 1e-15)) {
                    cur = r;
                    d = nd;
                    improved = true;
                }
            }
        }
        ++rounds;
        if (!improved) step *= 0.5;
    }
    Candidate c;
    c.d = d;
    if (cur.ok) {
        c.u = cur.u;
        c.objective = cur.value;
        c.slack = evaluate(cur.u, d, q).slack;
    } else {
        c.u = {1, 0, 0};
        c.objective = -1.0;
        c.slack = -1.0;
    }
    return c;
}

}  // namespace

void BecBscParams::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("BecBscParams: p outside [0,1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("BecBscParams: alpha outside [0,1]");
    if (!(beta >= 0.0 && beta <= 0.5)) throw std::invalid_argument("BecBscParams: beta outside [0,0.5]");
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::BMoreCapable: return "B-more-capable";
        case Regime::WMoreCapable: return "W-more-capable";
        case Regime::Boundary: return "boundary";
    }
    return "?";
}

double rate_floor(const BecBscParams& params) {
    params.validate();
    return params.alpha * binary_entropy(params.p);
}

double outer_dw(const BecBscParams& params) {
    params.validate();
    const double p = params.p, beta = params.beta;
    // sum over w of min_x-excluded mass: the MAP estimator keeps the larger of
    // the two posterior masses per w.
    const double m0 = std::min((1 - p) * (1 - beta), p * beta);        // w = 0
    const double m1 = std::min((1 - p) * beta, p * (1 - beta));        // w = 1
    return m0 + m1;
}

double capability_gap(const BecBscParams& params) {
    params.validate();
    return (1.0 - params.alpha) * binary_entropy(params.p) -
           binary_entropy(binary_convolve(params.p, params.beta)) + binary_entropy(params.beta);
}

std::vector<double> capability_crossover(double alpha, double beta) {
    BecBscParams probe{0.5, alpha, beta};
    probe.validate();
    auto gap = [&](double p) { return capability_gap({p, alpha, beta}); };

    std::vector<double> roots;
    const int scan = 4096;
    double prev_p = 1e-9;
    double prev_g = gap(prev_p);
    for (int i = 1; i <= scan; ++i) {
        const double p = 1e-9 + (0.5 - 1e-9) * static_cast<double>(i) / scan;
        const double g = gap(p);
        if ((prev_g < 0.0) != (g < 0.0) && prev_g != 0.0) {
            double lo = prev_p, hi = p;
            for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((gap(mid) < 0.0) == (prev_g < 0.0)) lo = mid;
                else hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_p = p;
        prev_g = g;
    }

    std::vector<double> out;
    for (double r : roots) {
        out.push_back(r);
        if (std::abs(r - 0.5) > 1e-9) out.push_back(1.0 - r);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              out.end());
    return out;
}

ThreeAtomSolution solve_theorem4(const BecBscParams& params, int grid_resolution, int refine_iters) {
    params.validate();
    if (grid_resolution < 2) throw std::invalid_argument("solve_theorem4: gridResolution must be >= 2");
    const BecBscParams& q = params;
    const double target = 1.0 - q.p;

    constexpr std::size_t kTopK = 12;
    std::vector<Candidate> seeds;

    auto offer_point = [&](const std::array<double, 3>& u, const std::array<double, 3>& d) {
        const double mean = u[0] * d[0] + u[1] * d[1] + u[2] * d[2];
        if (std::abs(mean - target) > kMeanTol) return;
        Eval e = evaluate(u, d, q);
        if (!e.feasible) return;
        offer(seeds, kTopK, Candidate{u, d, e.objective, e.slack});
    };

    // Baselines: the single-atom point (feasible exactly in the B-more-capable
    // regime) and the deterministic two-atom point (slack exactly zero).
    offer_point({1.0, 0.0, 0.0}, {target, target, target});
    offer_point({q.p, 1.0 - q.p, 0.0}, {0.0, 1.0, 0.0});

    // Boundary-repair families: move mass s from the single atom onto a
    // deterministic edge atom; keeps the mean exact and restores feasibility
    // just inside the crossover.
    const int kRepairSteps = 400;
    for (int k = 1; k < kRepairSteps; ++k) {
        const double s = static_cast<double>(k) / kRepairSteps;
        if (1.0 - s <= 1e-12) continue;
        {  // edge delta = 0
            const double d1 = target / (1.0 - s);
            if (d1 <= 1.0) offer_point({1.0 - s, s, 0.0}, {d1, 0.0, 0.0});
        }
        {  // edge delta = 1
            const double d1 = (target - s) / (1.0 - s);
            if (d1 >= 0.0 && d1 <= 1.0) offer_point({1.0 - s, s, 0.0}, {d1, 1.0, 0.0});
        }
    }

    // Lattice over (u1, u2, d1, d2) with d3 eliminated by the mean constraint.
    const int g = grid_resolution;
    std::vector<std::pair<int, int>> upairs;
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j + i <= g; ++j) upairs.emplace_back(i, j);

    const std::size_t block = 64;
    const std::size_t nblocks = (upairs.size() + block - 1) / block;
    unsigned hw = std::thread::hardware_concurrency();
    const std::size_t nthreads = std::max(1u, hw);

    std::vector<std::vector<Candidate>> block_tops(nblocks);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t bi = next.fetch_add(1);
            if (bi >= nblocks) return;
            std::vector<Candidate> local;
            const std::size_t lo = bi * block;
            const std::size_t hi = std::min(upairs.size(), lo + block);
            for (std::size_t k = lo; k < hi; ++k) {
                const double u1 = static_cast<double>(upairs[k].first) / g;
                const double u2 = static_cast<double>(upairs[k].second) / g;
                const double u3 = 1.0 - u1 - u2;
                for (int a = 0; a <= g; ++a) {
                    const double d1 = static_cast<double>(a) / g;
                    for (int b = 0; b <= g; ++b) {
                        const double d2 = static_cast<double>(b) / g;
                        const double r = target - u1 * d1 - u2 * d2;
                        double d3;
                        if (u3 > 1e-12) {
                            d3 = r / u3;
                            if (d3 < -1e-12 || d3 > 1.0 + 1e-12) continue;
                            d3 = clamp01(d3);
                        } else {
                            if (std::abs(r) > 1e-12) continue;
                            d3 = 0.0;
                        }
                        const std::array<double, 3> u{u1, u2, u3};
                        const std::array<double, 3> d{d1, d2, d3};
                        Eval e = evaluate(u, d, q);
                        if (!e.feasible) continue;
                        offer(local, kTopK, Candidate{u, d, e.objective, e.slack});
                    }
                }
            }
            block_tops[bi] = std::move(local);
        }
    };
    {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& bt : block_tops) {
        for (const auto& c : bt) offer(seeds, kTopK, c);
    }

    ThreeAtomSolution out;
    if (seeds.empty()) {
        // Should not occur: the deterministic two-atom baseline is always
        // feasible. Report the single-atom point with its (negative) slack.
        std::array<double, 3> u{1, 0, 0};
        std::array<double, 3> d{target, target, target};
        Eval e = evaluate(u, d, q);
        out.u = u;
        out.delta = d;
        out.objective = e.objective;
        out.constraint_slack = e.slack;
        out.feasible = false;
        out.note = "no feasible point found; returning best-effort single atom";
        return out;
    }

    Candidate best = seeds.front();
    for (const auto& s : seeds) {
        Candidate p = polish(s.d, q, refine_iters);
        if (p.objective > best.objective + 1e-15) best = p;
    }

    out.u = best.u;
    out.delta = best.d;
    Eval e = evaluate(best.u, best.d, q);
    out.objective = e.objective;
    out.constraint_slack = e.slack;
    out.feasible = e.feasible;
    return out;
}

std::vector<SweepRow> sweep_curve(double alpha, double beta, const std::vector<double>& p_grid,
                                  int grid_resolution, int refine_iters, int threads) {
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sweep_curve: pGrid outside [0,1]");
    }
    const std::vector<double> roots = capability_crossover(alpha, beta);

    auto regime_of = [&](double p) {
        for (double r : roots) {
            if (std::abs(p - r) <= 1e-8) return Regime::Boundary;
        }
        // Classify by the gap sign at the midpoint of the sub-interval of
        // (0,1) containing p; robust at the endpoints where the gap vanishes.
        double lo = 0.0, hi = 1.0;
        for (double r : roots) {
            if (r < p && r > lo) lo = r;
            if (r > p && r < hi) hi = r;
        }
        const double mid = 0.5 * (lo + hi);
        const double g = capability_gap({mid, alpha, beta});
        if (g > 1e-12) return Regime::BMoreCapable;
        if (g < -1e-12) return Regime::WMoreCapable;
        return Regime::Boundary;
    };

    std::vector<SweepRow> rows(p_grid.size());
    unsigned hw = std::thread::hardware_concurrency();
    const std::size_t nthreads = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, hw);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= p_grid.size()) return;
            const double p = p_grid[i];
            BecBscParams q{p, alpha, beta};
            SweepRow row;
            row.p = p;
            row.rate_floor_bits = rate_floor(q);
            row.solution = solve_theorem4(q, grid_resolution, refine_iters);
            row.inner_dw = row.solution.objective;
            row.outer_dw = outer_dw(q);
            row.regime = regime_of(p);
            rows[i] = std::move(row);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return rows;
}

std::vector<double> uniform_p_grid(int count) {
    if (count < 2) throw std::invalid_argument("uniform_p_grid: need at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (count - 1);
    return g;
}

JointPmf becbsc_joint(const BecBscParams& params) {
    params.validate();
    JointPmf xb = push_through(Pmf::bernoulli(params.p), Channel::bec(params.alpha));
    return extend_with_channel(xb, {0}, Channel::bsc(params.beta));
}

}  // namespace rdsec
