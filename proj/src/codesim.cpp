#include "rdsec/codesim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "rdsec/info.hpp"
#include "rdsec/numeric.hpp"

namespace rdsec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t size_from_rate(double rate, int n) {
    if (rate < 0.0) throw std::invalid_argument("SchemeRates: rates must be >= 0");
    const double raw = std::pow(2.0, rate * n);
    if (raw > 9e15) throw ResourceLimitError("codebook size overflows", static_cast<std::size_t>(-1));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(raw)));
}

Pmf to_pmf(const JointPmf& single) {
    if (single.num_axes() != 1) throw std::invalid_argument("to_pmf: expected one coordinate");
    return Pmf(single.axes()[0], single.probs());
}

int sample_pmf(const Pmf& p, CounterRng& rng) {
    const double u = rng.next_double();
    double acc = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

int sample_row(const Channel& c, int x, CounterRng& rng) {
    const double u = rng.next_double();
    double acc = 0.0;
    for (int y = 0; y < c.output().size; ++y) {
        acc += c.prob(x, y);
        if (u < acc) return y;
    }
    return c.output().size - 1;
}

std::vector<double> log_table(const Channel& c) {
    std::vector<double> t(static_cast<std::size_t>(c.input().size) * c.output().size);
    for (int x = 0; x < c.input().size; ++x) {
        for (int y = 0; y < c.output().size; ++y) {
            const double p = c.row_defined(x) ? c.prob(x, y) : 0.0;
            t[static_cast<std::size_t>(x) * c.output().size + y] = p > 0.0 ? std::log(p) : kNegInf;
        }
    }
    return t;
}

}  // namespace

CodebookSizes sizes_for(const SchemeRates& rates) {
    if (rates.n < 1) throw std::invalid_argument("SchemeRates: n must be >= 1");
    CodebookSizes s;
    s.mp = size_from_rate(rates.rp, rates.n);
    s.mpp = size_from_rate(rates.rpp, rates.n);
    s.ms = size_from_rate(rates.rs, rates.n);
    s.msp = size_from_rate(rates.rsp, rates.n);
    return s;
}

SchemeRates realized_rates(const SchemeRates& requested) {
    const CodebookSizes s = sizes_for(requested);
    SchemeRates r = requested;
    r.rp = std::log2(static_cast<double>(s.mp)) / requested.n;
    r.rpp = std::log2(static_cast<double>(s.mpp)) / requested.n;
    r.rs = std::log2(static_cast<double>(s.ms)) / requested.n;
    r.rsp = std::log2(static_cast<double>(s.msp)) / requested.n;
    return r;
}

SuperpositionCodebook generate_codebook(const Pmf& p_u, const Channel& v_given_u,
                                        const SchemeRates& rates, std::uint64_t seed,
                                        std::size_t budget) {
    if (p_u.alphabet() != v_given_u.input()) {
        throw std::invalid_argument("generate_codebook: P_U and P_V|U disagree on the U alphabet");
    }
    SuperpositionCodebook cb;
    cb.n = rates.n;
    cb.u_alphabet = p_u.alphabet();
    cb.v_alphabet = v_given_u.output();
    cb.sizes = sizes_for(rates);
    cb.seed = seed;

    const std::size_t cells =
        cb.sizes.clouds() * (1 + cb.sizes.satellites_per_cloud()) * static_cast<std::size_t>(rates.n);
    if (cells > budget) throw ResourceLimitError("generate_codebook: codebook exceeds budget", cells);

    CounterRng rng(seed, RngStream::Codebook);
    cb.u_words.resize(cb.sizes.clouds());
    cb.v_words.resize(cb.sizes.clouds() * cb.sizes.satellites_per_cloud());
    for (std::size_t c = 0; c < cb.sizes.clouds(); ++c) {
        auto& u = cb.u_words[c];
        u.resize(static_cast<std::size_t>(rates.n));
        for (int t = 0; t < rates.n; ++t) {
            u[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(sample_pmf(p_u, rng));
        }
        for (std::size_t s = 0; s < cb.sizes.satellites_per_cloud(); ++s) {
            auto& v = cb.v_words[c * cb.sizes.satellites_per_cloud() + s];
            v.resize(static_cast<std::size_t>(rates.n));
            for (int t = 0; t < rates.n; ++t) {
                v[static_cast<std::size_t>(t)] =
                    static_cast<std::uint8_t>(sample_row(v_given_u, u[static_cast<std::size_t>(t)], rng));
            }
        }
    }
    return cb;
}

MessageTuple likelihood_encode(const SuperpositionCodebook& cb, const std::vector<std::uint8_t>& x,
                               const Channel& x_given_v, CounterRng& rng) {
    if (x.size() != static_cast<std::size_t>(cb.n)) {
        throw std::invalid_argument("likelihood_encode: sequence length must equal n");
    }
    if (x_given_v.input() != cb.v_alphabet) {
        throw std::invalid_argument("likelihood_encode: channel input must be the V alphabet");
    }
    const std::vector<double> logp = log_table(x_given_v);
    const int nx = x_given_v.output().size;

    const std::size_t m_total = cb.sizes.messages();
    std::vector<double> loglik(m_total, 0.0);
    double best = kNegInf;
    for (std::size_t m = 0; m < m_total; ++m) {
        const auto& v = cb.v_words[m];
        double s = 0.0;
        for (int t = 0; t < cb.n; ++t) {
            const double lp = logp[static_cast<std::size_t>(v[static_cast<std::size_t>(t)]) * nx +
                                   x[static_cast<std::size_t>(t)]];
            if (lp == kNegInf) {
                s = kNegInf;
                break;
            }
            s += lp;
        }
        loglik[m] = s;
        best = std::max(best, s);
    }
    if (best == kNegInf) {
        throw EncodingFailure("likelihood_encode: every message has zero likelihood for this sequence");
    }

    NeumaierSum total;
    std::vector<double> weight(m_total);
    for (std::size_t m = 0; m < m_total; ++m) {
        weight[m] = loglik[m] == kNegInf ? 0.0 : std::exp(loglik[m] - best);
        total.add(weight[m]);
    }
    const double u = rng.next_double() * total.value();
    double acc = 0.0;
    std::size_t pick = m_total - 1;
    for (std::size_t m = 0; m < m_total; ++m) {
        acc += weight[m];
        if (u < acc) {
            pick = m;
            break;
        }
    }

    const std::size_t sat = pick % cb.sizes.satellites_per_cloud();
    const std::size_t cloud = pick / cb.sizes.satellites_per_cloud();
    MessageTuple out;
    out.mpp = cloud % cb.sizes.mpp;
    out.mp = cloud / cb.sizes.mpp;
    out.msp = sat % cb.sizes.msp;
    out.ms = sat / cb.sizes.msp;
    return out;
}

namespace {

template <typename Score>
std::pair<std::size_t, std::size_t> argmax_sub_codebook(const SuperpositionCodebook& cb, Score&& score) {
    double best = kNegInf;
    std::pair<std::size_t, std::size_t> arg{0, 0};
    bool first = true;
    for (std::size_t ap = 0; ap < cb.sizes.mpp; ++ap) {
        for (std::size_t as = 0; as < cb.sizes.msp; ++as) {
            const double s = score(ap, as);
            // Strict > keeps the lowest (ap, as) on ties.
            if (first || s > best) {
                best = s;
                arg = {ap, as};
                first = false;
            }
        }
    }
    return arg;
}

}  // namespace

std::pair<std::size_t, std::size_t> decode_legit(const SuperpositionCodebook& cb, std::size_t mp,
                                                 std::size_t ms, const std::vector<std::uint8_t>& b,
                                                 const Channel& b_given_v) {
    if (mp >= cb.sizes.mp || ms >= cb.sizes.ms) {
        throw std::invalid_argument("decode_legit: index out of range");
    }
    if (b.size() != static_cast<std::size_t>(cb.n)) throw std::invalid_argument("decode_legit: bad length");
    const std::vector<double> logp = log_table(b_given_v);
    const int nb = b_given_v.output().size;
    return argmax_sub_codebook(cb, [&](std::size_t ap, std::size_t as) {
        const auto& v = cb.v_words[cb.cloud_index(mp, ap) * cb.sizes.satellites_per_cloud() +
                                   cb.satellite_index(ms, as)];
        double s = 0.0;
        for (int t = 0; t < cb.n; ++t) {
            const double lp = logp[static_cast<std::size_t>(v[static_cast<std::size_t>(t)]) * nb +
                                   b[static_cast<std::size_t>(t)]];
            if (lp == kNegInf) return kNegInf;
            s += lp;
        }
        return s;
    });
}

std::pair<std::size_t, std::size_t> decode_legit_joint(const SuperpositionCodebook& cb, std::size_t mp,
                                                       std::size_t ms,
                                                       const std::vector<std::uint8_t>& b,
                                                       const Channel& b_given_uv) {
    if (mp >= cb.sizes.mp || ms >= cb.sizes.ms) {
        throw std::invalid_argument("decode_legit: index out of range");
    }
    if (b.size() != static_cast<std::size_t>(cb.n)) throw std::invalid_argument("decode_legit: bad length");
    const std::vector<double> logp = log_table(b_given_uv);
    const int nb = b_given_uv.output().size;
    const int nv = cb.v_alphabet.size;
    return argmax_sub_codebook(cb, [&](std::size_t ap, std::size_t as) {
        const auto& u = cb.u_words[cb.cloud_index(mp, ap)];
        const auto& v = cb.v_words[cb.cloud_index(mp, ap) * cb.sizes.satellites_per_cloud() +
                                   cb.satellite_index(ms, as)];
        double s = 0.0;
        for (int t = 0; t < cb.n; ++t) {
            const std::size_t in =
                static_cast<std::size_t>(u[static_cast<std::size_t>(t)]) * nv + v[static_cast<std::size_t>(t)];
            const double lp = logp[in * nb + b[static_cast<std::size_t>(t)]];
            if (lp == kNegInf) return kNegInf;
            s += lp;
        }
        return s;
    });
}

std::vector<std::uint8_t> reconstruct(const SuperpositionCodebook& cb, std::size_t mp, std::size_t mpp,
                                      std::size_t ms, std::size_t msp,
                                      const std::vector<std::uint8_t>& b, const std::vector<int>& phi,
                                      int b_size) {
    const auto& v = cb.v_word({mp, mpp, ms, msp});
    std::vector<std::uint8_t> y(static_cast<std::size_t>(cb.n));
    for (int t = 0; t < cb.n; ++t) {
        y[static_cast<std::size_t>(t)] =
            static_cast<std::uint8_t>(phi[static_cast<std::size_t>(v[static_cast<std::size_t>(t)]) * b_size +
                                          b[static_cast<std::size_t>(t)]]);
    }
    return y;
}

EavesdropperEstimate eavesdropper_optimal_estimate(const SuperpositionCodebook& cb, std::size_t mp,
                                                   std::size_t ms, const std::vector<std::uint8_t>& w,
                                                   const EavesdropperInputs& in, std::size_t budget,
                                                   bool condition_on_mpp, std::size_t mpp) {
    const int n = cb.n;
    const int nx = in.p_x.size();
    if (w.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("eavesdropper_optimal_estimate: bad length");
    }

    std::size_t seqs = 1;
    for (int t = 0; t < n; ++t) {
        if (seqs > budget / static_cast<std::size_t>(nx)) {
            throw ResourceLimitError("eavesdropper_optimal_estimate: enumeration exceeds budget",
                                     seqs * static_cast<std::size_t>(nx));
        }
        seqs *= static_cast<std::size_t>(nx);
    }
    const std::size_t m_total = cb.sizes.messages();
    if (seqs > budget / std::max<std::size_t>(1, m_total)) {
        throw ResourceLimitError("eavesdropper_optimal_estimate: enumeration exceeds budget",
                                 seqs * m_total);
    }

    const int nv = cb.v_alphabet.size;
    std::vector<double> pxv(static_cast<std::size_t>(nv) * nx);
    for (int v = 0; v < nv; ++v) {
        for (int x = 0; x < nx; ++x) {
            pxv[static_cast<std::size_t>(v) * nx + x] =
                in.x_given_v.row_defined(v) ? in.x_given_v.prob(v, x) : 0.0;
        }
    }

    const std::size_t sat_per_cloud = cb.sizes.satellites_per_cloud();
    std::vector<std::uint8_t> in_column(m_total, 0);
    for (std::size_t m = 0; m < m_total; ++m) {
        const std::size_t cloud = m / sat_per_cloud;
        const std::size_t sat = m % sat_per_cloud;
        const std::size_t m_mp = cloud / cb.sizes.mpp;
        const std::size_t m_mpp = cloud % cb.sizes.mpp;
        const std::size_t m_ms = sat / cb.sizes.msp;
        in_column[m] = (m_mp == mp && m_ms == ms && (!condition_on_mpp || m_mpp == mpp)) ? 1 : 0;
    }

    std::vector<double> letter_mass(static_cast<std::size_t>(n) * nx, 0.0);
    double total_mass = 0.0;

    std::vector<int> xs(static_cast<std::size_t>(n), 0);
    for (;;) {
        double prior = 1.0;
        for (int t = 0; t < n; ++t) {
            prior *= in.p_x[xs[static_cast<std::size_t>(t)]] *
                     in.w_given_x.prob(xs[static_cast<std::size_t>(t)], w[static_cast<std::size_t>(t)]);
        }
        if (prior > 0.0) {
            double col = 0.0, norm = 0.0;
            for (std::size_t m = 0; m < m_total; ++m) {
                const auto& v = cb.v_words[m];
                double lik = 1.0;
                for (int t = 0; t < n && lik > 0.0; ++t) {
                    lik *= pxv[static_cast<std::size_t>(v[static_cast<std::size_t>(t)]) * nx +
                               xs[static_cast<std::size_t>(t)]];
                }
                norm += lik;
                if (in_column[m]) col += lik;
            }
            if (norm > 0.0 && col > 0.0) {
                const double post = prior * (col / norm);
                total_mass += post;
                for (int t = 0; t < n; ++t) {
                    letter_mass[static_cast<std::size_t>(t) * nx + xs[static_cast<std::size_t>(t)]] += post;
                }
            }
        }
        int t = n - 1;
        while (t >= 0 && ++xs[static_cast<std::size_t>(t)] == nx) {
            xs[static_cast<std::size_t>(t)] = 0;
            --t;
        }
        if (t < 0) break;
    }

    if (total_mass <= 0.0) {
        throw std::logic_error("eavesdropper_optimal_estimate: observed pair has zero probability");
    }

    EavesdropperEstimate out;
    out.z.resize(static_cast<std::size_t>(n));
    const int nz = in.dw.y_size();
    NeumaierSum dsum;
    for (int t = 0; t < n; ++t) {
        double best = -1.0;
        int bestz = 0;
        for (int z = 0; z < nz; ++z) {
            double acc = 0.0;
            for (int x = 0; x < nx; ++x) {
                acc += letter_mass[static_cast<std::size_t>(t) * nx + x] * in.dw(x, z);
            }
            if (best < 0.0 || acc < best) {
                best = acc;
                bestz = z;
            }
        }
        out.z[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(bestz);
        dsum.add(best);
    }
    out.distortion = dsum.value() / (total_mass * n);
    return out;
}

SchemeQuantities scheme_quantities(const SystemSpec& spec, const AuxScheme& aux) {
    const JointPmf j = scheme_joint(spec, aux);  // (X,B,W,V,U)
    SchemeQuantities q;
    q.i_u_x = mutual_information(j, {4}, {0});
    q.i_u_b = mutual_information(j, {4}, {1});
    q.i_x_v_given_u = conditional_mutual_information(j, {0}, {3}, {4});
    q.i_v_w_given_u = conditional_mutual_information(j, {3}, {2}, {4});
    q.i_v_b_given_u = conditional_mutual_information(j, {3}, {1}, {4});
    q.expected_db = evaluate_inner(spec, aux).db_min;
    return q;
}

RateCheck validate_rates(const SchemeQuantities& q, const SchemeRates& requested) {
    const SchemeRates r = realized_rates(requested);
    const CodebookSizes s = sizes_for(requested);
    constexpr double kInfoTol = 1e-12;

    RateCheck c;
    c.public_covering = r.rp + r.rpp - q.i_u_x;
    c.public_decoding = q.i_u_b - r.rpp;
    c.secret_covering = r.rs + r.rsp - q.i_x_v_given_u;
    c.secrecy_floor = r.rsp - q.i_v_w_given_u;
    c.secret_decoding = q.i_v_b_given_u - r.rsp;

    const bool public_vacuous = s.clouds() == 1 && q.i_u_x <= kInfoTol;
    const bool secret_vacuous = s.satellites_per_cloud() == 1 && q.i_x_v_given_u <= kInfoTol;

    if (!public_vacuous && c.public_covering <= 0.0) {
        c.warnings.push_back("public covering rate rp+rpp does not exceed I(U;X)");
    }
    if (s.mpp > 1 && c.public_decoding <= 0.0) {
        c.warnings.push_back("public virtual rate rpp is not below I(U;B)");
    }
    if (!secret_vacuous && c.secret_covering <= 0.0) {
        c.warnings.push_back("secret covering rate rs+rsp does not exceed I(X;V|U)");
    }
    if (!(s.msp == 1 && q.i_v_w_given_u <= kInfoTol) && c.secrecy_floor <= 0.0) {
        c.warnings.push_back("secret virtual rate rsp does not exceed I(V;W|U)");
    }
    if (s.msp > 1 && c.secret_decoding <= 0.0) {
        c.warnings.push_back("secret virtual rate rsp is not below I(V;B|U)");
    }
    c.ok = c.warnings.empty();
    return c;
}

SchemeRates suggest_rates(const SchemeQuantities& q, int n, double margin_frac) {
    if (n < 1) throw std::invalid_argument("suggest_rates: n must be >= 1");
    if (!(margin_frac > 0.0 && margin_frac < 0.5)) {
        throw std::invalid_argument("suggest_rates: margin_frac must be in (0, 0.5)");
    }
    SchemeRates r;
    r.n = n;
    if (q.i_x_v_given_u > 1e-12) {
        const double gap = q.i_v_b_given_u - q.i_v_w_given_u;
        if (gap <= 0.0) {
            throw std::invalid_argument("suggest_rates: empty secrecy interval (I(V;W|U) >= I(V;B|U))");
        }
        r.rsp = q.i_v_w_given_u + margin_frac * gap;
        r.rs = std::max(0.0, (1.0 + margin_frac) * q.i_x_v_given_u - r.rsp);
    }
    r.rpp = 0.0;
    r.rp = (1.0 + margin_frac) * q.i_u_x;
    return r;
}

TrialsResult run_trials(const SystemSpec& spec, const AuxScheme& aux, const SchemeRates& rates,
                        int trials, std::uint64_t seed, const RunOptions& opts) {
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    const int nv = aux.v_given_x.output().size;
    if (aux.phi.size() != static_cast<std::size_t>(nv) * spec.b_size()) {
        throw std::invalid_argument("run_trials: phi must map V x B");
    }

    const JointPmf j = scheme_joint(spec, aux);  // (X,B,W,V,U)
    const Pmf p_u = to_pmf(marginal(j, {4}));
    const Channel v_given_u = condition(marginal(j, {4, 3}), {0});
    const Channel x_given_v = condition(marginal(j, {3, 0}), {0});
    const Channel b_given_v = condition(marginal(j, {3, 1}), {0});
    const Channel b_given_uv = condition(marginal(j, {4, 3, 1}), {0, 1});
    const Channel w_given_x = condition(marginal(spec.xbw, {0, 2}), {0});
    const Pmf p_x = to_pmf(marginal(spec.xbw, {0}));

    TrialsResult result;
    result.quantities = scheme_quantities(spec, aux);
    result.rate_check = validate_rates(result.quantities, rates);
    result.realized = realized_rates(rates);

    const SuperpositionCodebook shared_cb = generate_codebook(p_u, v_given_u, rates, seed, opts.budget);
    auto period_codebook = [&](int trial) {
        const std::uint64_t block = static_cast<std::uint64_t>(trial / opts.codebook_period);
        return generate_codebook(p_u, v_given_u, rates, CounterRng::mix64(seed ^ CounterRng::mix64(block + 1)),
                                 opts.budget);
    };
    const EavesdropperInputs eve{p_x, w_given_x, x_given_v, spec.dw};

    const int n = rates.n;
    const JointPmf& xbw = spec.xbw;
    const int b_alpha = spec.b_size();

    result.records.resize(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string failure_what;
    std::mutex failure_mutex;

    auto work = [&]() {
        std::vector<int> cell;
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= trials || failed.load()) return;
            try {
                TrialRecord rec;
                rec.x.resize(static_cast<std::size_t>(n));
                rec.b.resize(static_cast<std::size_t>(n));
                rec.w.resize(static_cast<std::size_t>(n));
                CounterRng src(seed, RngStream::Source, static_cast<std::uint64_t>(t));
                for (int i = 0; i < n; ++i) {
                    const double u = src.next_double();
                    double acc = 0.0;
                    std::size_t idx = xbw.cells() - 1;
                    for (std::size_t c = 0; c < xbw.cells(); ++c) {
                        acc += xbw.at_flat(c);
                        if (u < acc) {
                            idx = c;
                            break;
                        }
                    }
                    xbw.unflatten(idx, cell);
                    rec.x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(cell[0]);
                    rec.b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(cell[1]);
                    rec.w[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(cell[2]);
                }

                const SuperpositionCodebook own_cb =
                    opts.codebook_period > 0 ? period_codebook(t) : SuperpositionCodebook{};
                const SuperpositionCodebook& cb = opts.codebook_period > 0 ? own_cb : shared_cb;

                CounterRng enc(seed, RngStream::Encoder, static_cast<std::uint64_t>(t));
                rec.chosen = likelihood_encode(cb, rec.x, x_given_v, enc);

                const auto decoded =
                    opts.joint_decoder
                        ? decode_legit_joint(cb, rec.chosen.mp, rec.chosen.ms, rec.b, b_given_uv)
                        : decode_legit(cb, rec.chosen.mp, rec.chosen.ms, rec.b, b_given_v);
                rec.mpp_hat = decoded.first;
                rec.msp_hat = decoded.second;

                rec.y = reconstruct(cb, rec.chosen.mp, rec.mpp_hat, rec.chosen.ms, rec.msp_hat, rec.b,
                                    aux.phi, b_alpha);
                NeumaierSum db;
                for (int i = 0; i < n; ++i) {
                    db.add(spec.db(rec.x[static_cast<std::size_t>(i)], rec.y[static_cast<std::size_t>(i)]));
                }
                rec.db = db.value() / n;

                EavesdropperEstimate ee = eavesdropper_optimal_estimate(cb, rec.chosen.mp, rec.chosen.ms,
                                                                        rec.w, eve, opts.budget);
                rec.z = std::move(ee.z);
                rec.dw = ee.distortion;
                result.records[static_cast<std::size_t>(t)] = std::move(rec);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failed.exchange(true)) failure_what = e.what();
                return;
            }
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    const std::size_t nthreads =
        std::min<std::size_t>(static_cast<std::size_t>(trials),
                              opts.threads > 0 ? static_cast<std::size_t>(opts.threads) : std::max(1u, hw));
    {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw EncodingFailure(failure_what);

    // Serial compensated reduction: identical for any thread count.
    NeumaierSum db_sum, dw_sum;
    int errors = 0;
    for (const auto& rec : result.records) {
        db_sum.add(rec.db);
        dw_sum.add(rec.dw);
        if (rec.mpp_hat != rec.chosen.mpp || rec.msp_hat != rec.chosen.msp) ++errors;
    }
    TrialSummary& s = result.summary;
    s.n = n;
    s.trials = trials;
    s.seed = seed;
    s.mean_db = db_sum.value() / trials;
    s.mean_dw = dw_sum.value() / trials;
    s.decoder_error_rate = static_cast<double>(errors) / trials;

    NeumaierSum db_var, dw_var;
    for (const auto& rec : result.records) {
        db_var.add((rec.db - s.mean_db) * (rec.db - s.mean_db));
        dw_var.add((rec.dw - s.mean_dw) * (rec.dw - s.mean_dw));
    }
    if (trials > 1) {
        s.ci_db = 1.96 * std::sqrt(db_var.value() / (trials - 1)) / std::sqrt(static_cast<double>(trials));
        s.ci_dw = 1.96 * std::sqrt(dw_var.value() / (trials - 1)) / std::sqrt(static_cast<double>(trials));
    }
    return result;
}

std::vector<double> induced_output_distribution(const std::vector<std::vector<std::uint8_t>>& words,
                                                const std::vector<double>& weights,
                                                const Channel& x_given_v, int n) {
    if (words.size() != weights.size() || words.empty()) {
        throw std::invalid_argument("induced_output_distribution: need matching words and weights");
    }
    const int nx = x_given_v.output().size;
    std::size_t seqs = 1;
    for (int t = 0; t < n; ++t) seqs *= static_cast<std::size_t>(nx);

    std::vector<double> out(seqs, 0.0);
    std::vector<int> xs(static_cast<std::size_t>(n), 0);
    for (std::size_t idx = 0; idx < seqs; ++idx) {
        NeumaierSum mass;
        for (std::size_t m = 0; m < words.size(); ++m) {
            double lik = weights[m];
            const auto& v = words[m];
            for (int t = 0; t < n && lik > 0.0; ++t) {
                lik *= x_given_v.prob(v[static_cast<std::size_t>(t)], xs[static_cast<std::size_t>(t)]);
            }
            mass.add(lik);
        }
        out[idx] = mass.value();
        int t = n - 1;
        while (t >= 0 && ++xs[static_cast<std::size_t>(t)] == nx) {
            xs[static_cast<std::size_t>(t)] = 0;
            --t;
        }
    }
    return out;
}

SoftcoverResult softcover_tv(const Pmf& target, const Channel& x_given_v, const Pmf& p_v, double rate,
                             int n, int codebooks, std::uint64_t seed, std::size_t budget) {
    if (codebooks < 1) throw std::invalid_argument("softcover_tv: codebooks must be >= 1");
    if (target.alphabet() != x_given_v.output()) {
        throw std::invalid_argument("softcover_tv: target alphabet must match the channel output");
    }
    if (p_v.alphabet() != x_given_v.input()) {
        throw std::invalid_argument("softcover_tv: P_V must match the channel input");
    }
    const int nx = target.size();
    std::size_t seqs = 1;
    for (int t = 0; t < n; ++t) {
        if (seqs > budget / static_cast<std::size_t>(nx)) {
            throw ResourceLimitError("softcover_tv: enumeration exceeds budget",
                                     seqs * static_cast<std::size_t>(nx));
        }
        seqs *= static_cast<std::size_t>(nx);
    }
    const std::size_t m = size_from_rate(rate, n);
    if (m > budget) throw ResourceLimitError("softcover_tv: codebook exceeds budget", m);

    std::vector<double> target_seq(seqs, 1.0);
    {
        std::vector<int> xs(static_cast<std::size_t>(n), 0);
        for (std::size_t idx = 0; idx < seqs; ++idx) {
            double p = 1.0;
            for (int t = 0; t < n; ++t) p *= target[xs[static_cast<std::size_t>(t)]];
            target_seq[idx] = p;
            int t = n - 1;
            while (t >= 0 && ++xs[static_cast<std::size_t>(t)] == nx) {
                xs[static_cast<std::size_t>(t)] = 0;
                --t;
            }
        }
    }

    SoftcoverResult result;
    result.per_codebook.resize(static_cast<std::size_t>(codebooks));
    const std::vector<double> weights(m, 1.0 / static_cast<double>(m));
    for (int c = 0; c < codebooks; ++c) {
        CounterRng rng(seed, RngStream::Codebook, static_cast<std::uint64_t>(c));
        std::vector<std::vector<std::uint8_t>> words(m);
        for (auto& wv : words) {
            wv.resize(static_cast<std::size_t>(n));
            for (int t = 0; t < n; ++t) {
                wv[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(sample_pmf(p_v, rng));
            }
        }
        const std::vector<double> induced = induced_output_distribution(words, weights, x_given_v, n);
        NeumaierSum l1;
        for (std::size_t i = 0; i < seqs; ++i) l1.add(std::abs(induced[i] - target_seq[i]));
        result.per_codebook[static_cast<std::size_t>(c)] = 0.5 * l1.value();
    }

    NeumaierSum mean;
    for (double tv : result.per_codebook) mean.add(tv);
    result.mean_tv = mean.value() / codebooks;
    if (codebooks > 1) {
        NeumaierSum var;
        for (double tv : result.per_codebook) var.add((tv - result.mean_tv) * (tv - result.mean_tv));
        result.std_tv = std::sqrt(var.value() / (codebooks - 1));
    }
    return result;
}

SoftcoverResult superposition_softcover_tv(const Lemma2Setup& setup, double r1, double r2, int n, int k,
                                           int codebooks, std::uint64_t seed, std::size_t budget) {
    if (codebooks < 1) throw std::invalid_argument("superposition_softcover_tv: codebooks must be >= 1");
    if (k < 0 || k > n) throw std::invalid_argument("superposition_softcover_tv: need 0 <= k <= n");
    const int nu = setup.p_u.size();
    const int nv = setup.v_given_u.output().size;
    const int nx = setup.x_given_uv.output().size;
    const int nz = setup.z_given_xuv.output().size;
    if (setup.v_given_u.input().size != nu || setup.x_given_uv.input().size != nu * nv ||
        setup.z_given_xuv.input().size != nx * nu * nv) {
        throw std::invalid_argument("superposition_softcover_tv: inconsistent alphabets");
    }

    const std::size_t m1 = size_from_rate(r1, n);
    const std::size_t m2 = size_from_rate(r2, n);

    std::size_t xseqs = 1;
    for (int t = 0; t < n; ++t) xseqs *= static_cast<std::size_t>(nx);
    std::size_t zseqs = 1;
    for (int t = 0; t < k; ++t) zseqs *= static_cast<std::size_t>(nz);
    const std::size_t work = m1 * m2 * xseqs * std::max<std::size_t>(zseqs, 1);
    if (work > budget) {
        throw ResourceLimitError("superposition_softcover_tv: enumeration exceeds budget", work);
    }

    // Single-letter joint (U, V, X, Z) and the cloud-only conditionals of the
    // idealized comparison distribution.
    JointPmf uv = push_through(setup.p_u, setup.v_given_u);
    JointPmf uvx = extend_with_channel(uv, {0, 1}, setup.x_given_uv);
    JointPmf uvxz = extend_with_channel(uvx, {2, 0, 1}, setup.z_given_xuv);
    const Channel x_given_u = condition(marginal(uvxz, {0, 2}), {0});
    const Channel z_given_ux = condition(marginal(uvxz, {0, 2, 3}), {0, 1});

    SoftcoverResult result;
    result.per_codebook.resize(static_cast<std::size_t>(codebooks));
    for (int c = 0; c < codebooks; ++c) {
        CounterRng rng(seed, RngStream::Codebook, static_cast<std::uint64_t>(c));
        std::vector<std::vector<std::uint8_t>> uw(m1);
        std::vector<std::vector<std::uint8_t>> vw(m1 * m2);
        for (std::size_t a = 0; a < m1; ++a) {
            uw[a].resize(static_cast<std::size_t>(n));
            for (int t = 0; t < n; ++t) {
                uw[a][static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(sample_pmf(setup.p_u, rng));
            }
            for (std::size_t b = 0; b < m2; ++b) {
                auto& v = vw[a * m2 + b];
                v.resize(static_cast<std::size_t>(n));
                for (int t = 0; t < n; ++t) {
                    v[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(
                        sample_row(setup.v_given_u, uw[a][static_cast<std::size_t>(t)], rng));
                }
            }
        }

        NeumaierSum l1;
        std::vector<int> xs(static_cast<std::size_t>(n), 0);
        std::vector<int> zs(static_cast<std::size_t>(std::max(k, 1)), 0);
        for (std::size_t a = 0; a < m1; ++a) {
            std::fill(xs.begin(), xs.end(), 0);
            for (std::size_t xi = 0; xi < xseqs; ++xi) {
                double qx = 1.0;
                for (int t = 0; t < n && qx > 0.0; ++t) {
                    const int u = uw[a][static_cast<std::size_t>(t)];
                    qx *= x_given_u.row_defined(u) ? x_given_u.prob(u, xs[static_cast<std::size_t>(t)]) : 0.0;
                }
                std::fill(zs.begin(), zs.end(), 0);
                for (std::size_t zi = 0; zi < std::max<std::size_t>(zseqs, 1); ++zi) {
                    NeumaierSum pmass;
                    for (std::size_t b = 0; b < m2; ++b) {
                        const auto& v = vw[a * m2 + b];
                        double lik = 1.0;
                        for (int t = 0; t < n && lik > 0.0; ++t) {
                            const int in = uw[a][static_cast<std::size_t>(t)] * nv + v[static_cast<std::size_t>(t)];
                            lik *= setup.x_given_uv.prob(in, xs[static_cast<std::size_t>(t)]);
                        }
                        for (int t = 0; t < k && lik > 0.0; ++t) {
                            const int in =
                                (xs[static_cast<std::size_t>(t)] * nu + uw[a][static_cast<std::size_t>(t)]) * nv +
                                v[static_cast<std::size_t>(t)];
                            lik *= setup.z_given_xuv.prob(in, zs[static_cast<std::size_t>(t)]);
                        }
                        pmass.add(lik);
                    }
                    const double p = pmass.value() / (static_cast<double>(m1) * static_cast<double>(m2));

                    double q = qx / static_cast<double>(m1);
                    for (int t = 0; t < k && q > 0.0; ++t) {
                        const int in = uw[a][static_cast<std::size_t>(t)] * nx + xs[static_cast<std::size_t>(t)];
                        q *= z_given_ux.row_defined(in) ? z_given_ux.prob(in, zs[static_cast<std::size_t>(t)]) : 0.0;
                    }
                    l1.add(std::abs(p - q));

                    int t = k - 1;
                    while (t >= 0 && ++zs[static_cast<std::size_t>(t)] == nz) {
                        zs[static_cast<std::size_t>(t)] = 0;
                        --t;
                    }
                }
                int t = n - 1;
                while (t >= 0 && ++xs[static_cast<std::size_t>(t)] == nx) {
                    xs[static_cast<std::size_t>(t)] = 0;
                    --t;
                }
            }
        }
        result.per_codebook[static_cast<std::size_t>(c)] = 0.5 * l1.value();
    }

    NeumaierSum mean;
    for (double tv : result.per_codebook) mean.add(tv);
    result.mean_tv = mean.value() / codebooks;
    if (codebooks > 1) {
        NeumaierSum var;
        for (double tv : result.per_codebook) var.add((tv - result.mean_tv) * (tv - result.mean_tv));
        result.std_tv = std::sqrt(var.value() / (codebooks - 1));
    }
    return result;
}

}  // namespace rdsec
