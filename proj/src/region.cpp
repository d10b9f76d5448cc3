#include "rdsec/region.hpp"

#include <algorithm>
#include <cmath>

#include "rdsec/info.hpp"
#include "rdsec/numeric.hpp"
#include "rdsec/rng.hpp"

namespace rdsec {

namespace {

// Coordinate indices in the scheme joint.
constexpr std::size_t kX = 0, kB = 1, kW = 2, kV = 3, kU = 4;

std::vector<std::vector<double>> simplex_lattice(int cells, int resolution) {
    std::vector<std::vector<double>> out;
    std::vector<int> comp(static_cast<std::size_t>(cells), 0);
    // Enumerate compositions of `resolution` into `cells` parts.
    auto rec = [&](auto&& self, int idx, int remaining) -> void {
        if (idx == cells - 1) {
            comp[static_cast<std::size_t>(idx)] = remaining;
            std::vector<double> row(static_cast<std::size_t>(cells));
            for (int i = 0; i < cells; ++i) {
                row[static_cast<std::size_t>(i)] = static_cast<double>(comp[static_cast<std::size_t>(i)]) / resolution;
            }
            out.push_back(std::move(row));
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            comp[static_cast<std::size_t>(idx)] = k;
            self(self, idx + 1, remaining - k);
        }
    };
    rec(rec, 0, resolution);
    return out;
}

Channel rows_to_channel(int in, int out, const std::vector<const std::vector<double>*>& rows) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(in) * out);
    for (const auto* r : rows) flat.insert(flat.end(), r->begin(), r->end());
    return Channel(Alphabet(in), Alphabet(out), std::move(flat));
}

}  // namespace

SystemSpec::SystemSpec(JointPmf joint, DistortionMeasure d_b, DistortionMeasure d_w)
    : xbw(std::move(joint)), db(std::move(d_b)), dw(std::move(d_w)) {
    if (xbw.num_axes() != 3) throw std::invalid_argument("SystemSpec: joint must have coordinates (X,B,W)");
    if (db.x_size() != x_size() || dw.x_size() != x_size()) {
        throw std::invalid_argument("SystemSpec: distortion rows must match the source alphabet");
    }
}

JointPmf scheme_joint(const SystemSpec& spec, const AuxScheme& aux) {
    if (aux.v_given_x.input() != spec.xbw.axes()[0]) {
        throw std::invalid_argument("scheme_joint: V-channel input must be the source alphabet");
    }
    if (aux.u_given_v.input() != aux.v_given_x.output()) {
        throw std::invalid_argument("scheme_joint: U-channel input must be the V alphabet");
    }
    JointPmf xbwv = extend_with_channel(spec.xbw, {kX}, aux.v_given_x);
    return extend_with_channel(xbwv, {kV}, aux.u_given_v);
}

double eavesdropper_best_distortion(const JointPmf& uwx, const DistortionMeasure& dw) {
    if (uwx.num_axes() != 3) throw std::invalid_argument("eavesdropper_best_distortion: expect (U,W,X)");
    const int nu = uwx.axes()[0].size;
    const int nw = uwx.axes()[1].size;
    const int nx = uwx.axes()[2].size;
    if (nx != dw.x_size()) throw std::invalid_argument("eavesdropper_best_distortion: alphabet mismatch");
    const int nz = dw.y_size();

    NeumaierSum total;
    for (int u = 0; u < nu; ++u) {
        for (int w = 0; w < nw; ++w) {
            double best = -1.0;
            for (int z = 0; z < nz; ++z) {
                double acc = 0.0;
                for (int x = 0; x < nx; ++x) {
                    acc += uwx.at_flat((static_cast<std::size_t>(u) * nw + w) * nx + x) * dw(x, z);
                }
                if (best < 0.0 || acc < best) best = acc;  // strict <: ties keep the lowest z
            }
            total.add(best);
        }
    }
    return total.value();
}

InnerEvaluation evaluate_inner(const SystemSpec& spec, const AuxScheme& aux) {
    const JointPmf j = scheme_joint(spec, aux);
    const int nv = aux.v_given_x.output().size;
    const int nb = spec.b_size();
    if (aux.phi.size() != static_cast<std::size_t>(nv) * nb) {
        throw std::invalid_argument("evaluate_inner: phi must map V x B");
    }
    InnerEvaluation e;
    e.r_min = conditional_mutual_information(j, {kV}, {kX}, {kB});
    e.secrecy_slack = conditional_mutual_information(j, {kV}, {kB}, {kU}) -
                      conditional_mutual_information(j, {kV}, {kW}, {kU});

    // E[d_b(X, phi(V, B))] on the (X, B, V) marginal.
    const JointPmf xbv = marginal(j, {kX, kB, kV});
    NeumaierSum dbsum;
    for (int x = 0; x < spec.x_size(); ++x) {
        for (int b = 0; b < nb; ++b) {
            for (int v = 0; v < nv; ++v) {
                const double p = xbv.at_flat((static_cast<std::size_t>(x) * nb + b) * nv + v);
                if (p == 0.0) continue;
                const int y = aux.phi[static_cast<std::size_t>(v) * nb + b];
                if (y < 0 || y >= spec.y_size()) throw std::invalid_argument("evaluate_inner: phi out of range");
                dbsum.add(p * spec.db(x, y));
            }
        }
    }
    e.db_min = dbsum.value();
    e.dw_max = eavesdropper_best_distortion(marginal(j, {kU, kW, kX}), spec.dw);
    return e;
}

OuterEvaluation evaluate_outer(const SystemSpec& spec, const Channel& v_given_x,
                               const std::vector<int>& phi) {
    AuxScheme aux{v_given_x, Channel::identity(v_given_x.output().size), phi, {}};
    const JointPmf j = scheme_joint(spec, aux);
    OuterEvaluation e;
    e.r_min = conditional_mutual_information(j, {kV}, {kX}, {kB});
    e.db_min = evaluate_inner(spec, aux).db_min;

    // Symbol-by-symbol estimation from W alone: a constant-U joint.
    JointPmf wx = marginal(spec.xbw, {kW, kX});
    std::vector<double> cells(wx.probs());
    JointPmf uwx({Alphabet(1), wx.axes()[0], wx.axes()[1]}, std::move(cells));
    e.dw_cap = eavesdropper_best_distortion(uwx, spec.dw);
    return e;
}

std::vector<int> pointwise_optimal_phi(const SystemSpec& spec, const Channel& v_given_x) {
    const int nv = v_given_x.output().size;
    const int nb = spec.b_size();
    const int nx = spec.x_size();
    const int ny = spec.y_size();

    JointPmf xbv = extend_with_channel(marginal(spec.xbw, {0, 1}), {0}, v_given_x);  // (X, B, V)
    std::vector<int> phi(static_cast<std::size_t>(nv) * nb, 0);
    for (int v = 0; v < nv; ++v) {
        for (int b = 0; b < nb; ++b) {
            double best = -1.0;
            int besty = 0;
            for (int y = 0; y < ny; ++y) {
                double acc = 0.0;
                for (int x = 0; x < nx; ++x) {
                    acc += xbv.at_flat((static_cast<std::size_t>(x) * nb + b) * nv + v) * spec.db(x, y);
                }
                if (best < 0.0 || acc < best) {
                    best = acc;
                    besty = y;
                }
            }
            phi[static_cast<std::size_t>(v) * nb + b] = besty;
        }
    }
    return phi;
}

TripleStatus certify_triple(const RateDistortionTriple& t, const InnerEvaluation& eval, double margin) {
    if (eval.secrecy_slack > margin && t.rate > eval.r_min + margin && t.db >= eval.db_min &&
        t.dw <= eval.dw_max) {
        return TripleStatus::InnerAchievable;
    }
    return TripleStatus::Undetermined;
}

namespace {

bool dominates(const FrontierPoint& a, const FrontierPoint& b) {
    const bool geq = a.rate <= b.rate && a.db <= b.db && a.dw >= b.dw;
    const bool strict = a.rate < b.rate || a.db < b.db || a.dw > b.dw;
    return geq && strict;
}

void pareto_insert(std::vector<FrontierPoint>& frontier, FrontierPoint p) {
    for (const auto& q : frontier) {
        if (dominates(q, p)) return;
    }
    frontier.erase(std::remove_if(frontier.begin(), frontier.end(),
                                  [&](const FrontierPoint& q) { return dominates(p, q); }),
                   frontier.end());
    frontier.push_back(std::move(p));
}

// Mass-shift refinement moves: single-row shifts plus coupled two-row shifts,
// since optima often sit along valleys where rows must change together.
struct RowMove {
    int channel;  // 0 = first channel, 1 = second channel, 2 = coupled rows 0/1 of the first
    int row_a;
    int from_a;
    int to_a;
    int from_b = 0;
    int to_b = 0;
};

std::vector<double> channel_rows(const Channel& c) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(c.input().size) * c.output().size);
    for (int x = 0; x < c.input().size; ++x) {
        for (int y = 0; y < c.output().size; ++y) flat.push_back(c.prob(x, y));
    }
    return flat;
}

bool apply_shift(std::vector<double>& rows, int out_size, int row, int from, int to, double step) {
    double& src = rows[static_cast<std::size_t>(row) * out_size + from];
    double& dst = rows[static_cast<std::size_t>(row) * out_size + to];
    const double amount = std::min(step, src);
    if (amount <= 1e-15) return false;
    src -= amount;
    dst += amount;
    return true;
}

// Near-deterministic channels the simplex lattice cannot express: blends
// (1-s) f + s g of deterministic maps over a log-spaced s grid. The feasible
// set can be a thin sliver hugging the deterministic corners, so these seeds
// matter when the secrecy constraint is nearly active.
std::vector<std::vector<double>> structured_channels(int in, int out) {
    std::vector<std::vector<double>> result;
    std::size_t n_maps = 1;
    for (int i = 0; i < in; ++i) {
        if (n_maps > 512) break;
        n_maps *= static_cast<std::size_t>(out);
    }
    n_maps = std::min<std::size_t>(n_maps, 512);

    auto map_rows = [&](std::size_t code) {
        std::vector<int> f(static_cast<std::size_t>(in));
        for (int x = 0; x < in; ++x) {
            f[static_cast<std::size_t>(x)] = static_cast<int>(code % out);
            code /= static_cast<std::size_t>(out);
        }
        return f;
    };

    for (std::size_t a = 0; a < n_maps; ++a) {
        const std::vector<int> f = map_rows(a);
        {
            std::vector<double> flat(static_cast<std::size_t>(in) * out, 0.0);
            for (int x = 0; x < in; ++x) flat[static_cast<std::size_t>(x) * out + f[static_cast<std::size_t>(x)]] = 1.0;
            result.push_back(std::move(flat));
        }
        for (std::size_t b = 0; b < n_maps; ++b) {
            if (a == b) continue;
            const std::vector<int> g = map_rows(b);
            for (int j = 1; j <= 14; ++j) {
                const double s = std::pow(2.0, -j);
                std::vector<double> flat(static_cast<std::size_t>(in) * out, 0.0);
                for (int x = 0; x < in; ++x) {
                    flat[static_cast<std::size_t>(x) * out + f[static_cast<std::size_t>(x)]] += 1.0 - s;
                    flat[static_cast<std::size_t>(x) * out + g[static_cast<std::size_t>(x)]] += s;
                }
                result.push_back(std::move(flat));
            }
        }
    }
    return result;
}

}  // namespace

InnerRegionResult optimize_inner(const SystemSpec& spec, const OptimizeOptions& opts) {
    const int nx = spec.x_size();
    const int card_v = opts.card_v > 0 ? opts.card_v : nx + 2;
    const int card_u = opts.card_u > 0 ? opts.card_u : nx + 1;
    if (opts.grid_resolution < 2) throw std::invalid_argument("optimize_inner: gridResolution must be >= 2");

    const auto v_rows = simplex_lattice(card_v, opts.grid_resolution);
    const auto u_rows = simplex_lattice(card_u, opts.grid_resolution);

    const double total_log = nx * std::log(static_cast<double>(v_rows.size())) +
                             card_v * std::log(static_cast<double>(u_rows.size()));
    const bool exhaustive = total_log <= std::log(static_cast<double>(opts.budget));

    InnerRegionResult result;
    double best_slack_seen = -1.0;

    auto evaluate_candidate = [&](const Channel& vchan, const Channel& uchan) {
        AuxScheme aux{vchan, uchan, pointwise_optimal_phi(spec, vchan), {}};
        InnerEvaluation e = evaluate_inner(spec, aux);
        best_slack_seen = std::max(best_slack_seen, e.secrecy_slack);
        if (e.secrecy_slack <= opts.margin) return;
        pareto_insert(result.frontier, FrontierPoint{e.r_min, e.db_min, e.dw_max, e.secrecy_slack, aux});
    };

    if (exhaustive) {
        std::size_t total = 1;
        for (int i = 0; i < nx; ++i) total *= v_rows.size();
        for (int i = 0; i < card_v; ++i) total *= u_rows.size();
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            std::vector<const std::vector<double>*> vr(static_cast<std::size_t>(nx));
            for (int i = 0; i < nx; ++i) {
                vr[static_cast<std::size_t>(i)] = &v_rows[c % v_rows.size()];
                c /= v_rows.size();
            }
            std::vector<const std::vector<double>*> ur(static_cast<std::size_t>(card_v));
            for (int i = 0; i < card_v; ++i) {
                ur[static_cast<std::size_t>(i)] = &u_rows[c % u_rows.size()];
                c /= u_rows.size();
            }
            evaluate_candidate(rows_to_channel(nx, card_v, vr), rows_to_channel(card_v, card_u, ur));
        }
    } else {
        CounterRng rng(opts.seed, RngStream::Search);
        for (std::size_t s = 0; s < opts.budget; ++s) {
            std::vector<const std::vector<double>*> vr(static_cast<std::size_t>(nx));
            for (int i = 0; i < nx; ++i) {
                vr[static_cast<std::size_t>(i)] = &v_rows[rng.next_below(v_rows.size())];
            }
            std::vector<const std::vector<double>*> ur(static_cast<std::size_t>(card_v));
            for (int i = 0; i < card_v; ++i) {
                ur[static_cast<std::size_t>(i)] = &u_rows[rng.next_below(u_rows.size())];
            }
            evaluate_candidate(rows_to_channel(nx, card_v, vr), rows_to_channel(card_v, card_u, ur));
        }
    }

    if (result.frontier.empty()) {
        result.feasible = false;
        result.diagnostic = "no scheme satisfied the secrecy condition (best slack " +
                            std::to_string(best_slack_seen) + ")";
        return result;
    }
    result.feasible = true;

    // Refine the best-Dw scheme by mass shifts on both channels.
    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < result.frontier.size(); ++i) {
        if (result.frontier[i].dw > result.frontier[best_idx].dw) best_idx = i;
    }
    std::vector<double> vflat = channel_rows(result.frontier[best_idx].scheme.v_given_x);
    std::vector<double> uflat = channel_rows(result.frontier[best_idx].scheme.u_given_v);
    double best_dw = result.frontier[best_idx].dw;

    std::vector<RowMove> moves;
    for (int r = 0; r < nx; ++r)
        for (int i = 0; i < card_v; ++i)
            for (int j = 0; j < card_v; ++j)
                if (i != j) moves.push_back({0, r, i, j});
    for (int r = 0; r < card_v; ++r)
        for (int i = 0; i < card_u; ++i)
            for (int j = 0; j < card_u; ++j)
                if (i != j) moves.push_back({1, r, i, j});
    if (nx >= 2 && card_v >= 2) {
        for (int i = 0; i < card_v; ++i)
            for (int j = 0; j < card_v; ++j)
                if (i != j) {
                    moves.push_back({2, 0, i, j, i, j});
                    moves.push_back({2, 0, i, j, j, i});
                }
    }

    double step = 1.0 / opts.grid_resolution;
    int rounds = 0;
    while (step > 1e-6 && rounds < opts.refine_iters) {
        bool improved = false;
        for (const auto& mv : moves) {
            std::vector<double> vtry = vflat;
            std::vector<double> utry = uflat;
            bool okmove = false;
            if (mv.channel == 0) {
                okmove = apply_shift(vtry, card_v, mv.row_a, mv.from_a, mv.to_a, step);
            } else if (mv.channel == 1) {
                okmove = apply_shift(utry, card_u, mv.row_a, mv.from_a, mv.to_a, step);
            } else {
                okmove = apply_shift(vtry, card_v, 0, mv.from_a, mv.to_a, step);
                okmove = apply_shift(vtry, card_v, 1, mv.from_b, mv.to_b, step) || okmove;
            }
            if (!okmove) continue;
            Channel vchan(Alphabet(nx), Alphabet(card_v), vtry);
            Channel uchan(Alphabet(card_v), Alphabet(card_u), utry);
            AuxScheme aux{vchan, uchan, pointwise_optimal_phi(spec, vchan), {}};
            InnerEvaluation e = evaluate_inner(spec, aux);
            if (e.secrecy_slack > opts.margin && e.dw_max > best_dw + 1e-15) {
                best_dw = e.dw_max;
                vflat = std::move(vtry);
                uflat = std::move(utry);
                pareto_insert(result.frontier,
                              FrontierPoint{e.r_min, e.db_min, e.dw_max, e.secrecy_slack, aux});
                improved = true;
            }
        }
        ++rounds;
        if (!improved) step *= 0.5;
    }

    std::sort(result.frontier.begin(), result.frontier.end(),
              [](const FrontierPoint& a, const FrontierPoint& b) {
                  if (a.rate != b.rate) return a.rate < b.rate;
                  if (a.db != b.db) return a.db < b.db;
                  return a.dw > b.dw;
              });
    return result;
}

LosslessInnerResult lossless_inner(const SystemSpec& spec, int card_u, int grid_resolution,
                                   std::uint64_t seed, int refine_iters, double margin) {
    const int nx = spec.x_size();
    if (spec.db.y_size() != nx) {
        throw std::invalid_argument("lossless_inner: d_b must be Hamming over Y = X");
    }
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < nx; ++y) {
            const double expect = (x == y) ? 0.0 : 1.0;
            if (spec.db(x, y) != expect) {
                throw std::invalid_argument("lossless_inner: d_b must be Hamming over Y = X");
            }
        }
    }
    if (card_u < 1) throw std::invalid_argument("lossless_inner: cardU must be >= 1");
    if (grid_resolution < 2) throw std::invalid_argument("lossless_inner: gridResolution must be >= 2");
    (void)seed;  // the lattice is enumerable at these cardinalities; kept for interface stability

    const double h_x_given_b = entropy(spec.xbw, {0, 1}) - entropy(spec.xbw, {1});

    // (X, B, W) extended with U drawn from X; slack is I(X;B|U) - I(X;W|U).
    auto eval_u = [&](const Channel& u_given_x) {
        JointPmf j = extend_with_channel(spec.xbw, {0}, u_given_x);  // (X,B,W,U)
        const double slack = conditional_mutual_information(j, {0}, {1}, {3}) -
                             conditional_mutual_information(j, {0}, {2}, {3});
        const double dw = eavesdropper_best_distortion(marginal(j, {3, 2, 0}), spec.dw);
        return std::make_pair(slack, dw);
    };

    LosslessInnerResult out{h_x_given_b, 0.0, Channel::identity(1), false, ""};

    const auto rows = simplex_lattice(card_u, grid_resolution);
    std::vector<const std::vector<double>*> pick(static_cast<std::size_t>(nx));
    std::size_t total = 1;
    for (int i = 0; i < nx; ++i) total *= rows.size();

    double best_dw = -1.0;
    std::vector<double> best_flat;
    double best_slack_seen = -1.0;
    auto consider = [&](const Channel& u_given_x) {
        auto [slack, dw] = eval_u(u_given_x);
        best_slack_seen = std::max(best_slack_seen, slack);
        if (slack <= margin) return;
        if (dw > best_dw) {
            best_dw = dw;
            best_flat = channel_rows(u_given_x);
        }
    };

    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (int i = 0; i < nx; ++i) {
            pick[static_cast<std::size_t>(i)] = &rows[c % rows.size()];
            c /= rows.size();
        }
        consider(rows_to_channel(nx, card_u, pick));
    }
    for (auto& flat : structured_channels(nx, card_u)) {
        consider(Channel(Alphabet(nx), Alphabet(card_u), std::move(flat)));
    }

    if (best_dw < 0.0) {
        out.diagnostic = "no U satisfied the secrecy condition (best slack " +
                         std::to_string(best_slack_seen) + ")";
        return out;
    }

    std::vector<RowMove> moves;
    for (int r = 0; r < nx; ++r)
        for (int i = 0; i < card_u; ++i)
            for (int j = 0; j < card_u; ++j)
                if (i != j) moves.push_back({0, r, i, j});
    if (nx >= 2) {
        for (int i = 0; i < card_u; ++i)
            for (int j = 0; j < card_u; ++j)
                if (i != j) {
                    moves.push_back({2, 0, i, j, i, j});
                    moves.push_back({2, 0, i, j, j, i});
                }
    }

    double step = 1.0 / grid_resolution;
    int rounds = 0;
    while (step > 1e-6 && rounds < refine_iters) {
        bool improved = false;
        for (const auto& mv : moves) {
            std::vector<double> flat = best_flat;
            bool okmove = false;
            if (mv.channel == 0) {
                okmove = apply_shift(flat, card_u, mv.row_a, mv.from_a, mv.to_a, step);
            } else {
                okmove = apply_shift(flat, card_u, 0, mv.from_a, mv.to_a, step);
                okmove = apply_shift(flat, card_u, 1, mv.from_b, mv.to_b, step) || okmove;
            }
            if (!okmove) continue;
            Channel u_given_x(Alphabet(nx), Alphabet(card_u), flat);
            auto [slack, dw] = eval_u(u_given_x);
            if (slack > margin && dw > best_dw + 1e-15) {
                best_dw = dw;
                best_flat = std::move(flat);
                improved = true;
            }
        }
        ++rounds;
        if (!improved) step *= 0.5;
    }

    out.dw_max = best_dw;
    out.u_given_x = Channel(Alphabet(nx), Alphabet(card_u), best_flat);
    out.feasible = true;
    return out;
}

}  // namespace rdsec
