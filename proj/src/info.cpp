#include "rdsec/info.hpp"

#include <algorithm>
#include <cmath>

#include "rdsec/numeric.hpp"
#include "rdsec/rng.hpp"

namespace rdsec {

namespace {

double entropy_of_table(const std::vector<double>& probs) {
    NeumaierSum s;
    for (double p : probs) {
        if (p > 0.0) s.add(-p * std::log2(p));
    }
    return s.value();
}

std::vector<std::size_t> sorted_union(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> u = a;
    u.insert(u.end(), b.begin(), b.end());
    std::sort(u.begin(), u.end());
    return u;
}

void require_disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                      const char* what) {
    for (std::size_t x : a) {
        if (std::find(b.begin(), b.end(), x) != b.end()) {
            throw std::invalid_argument(std::string(what) + ": coordinate sets overlap");
        }
    }
}

}  // namespace

double entropy(const JointPmf& j, const std::vector<std::size_t>& coords) {
    return entropy_of_table(marginal(j, coords).probs());
}

double entropy(const Pmf& p) { return entropy_of_table(p.probs()); }

double binary_entropy(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("binary_entropy: q outside [0,1]");
    if (q == 0.0 || q == 1.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double binary_convolve(double a, double b) {
    if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
        throw std::invalid_argument("binary_convolve: arguments outside [0,1]");
    }
    return a * (1.0 - b) + (1.0 - a) * b;
}

double mutual_information(const JointPmf& j, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b) {
    require_disjoint(a, b, "mutual_information");
    const double h = entropy(j, a) + entropy(j, b) - entropy(j, sorted_union(a, b));
    return std::max(h, 0.0);
}

double conditional_mutual_information(const JointPmf& j, const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b,
                                      const std::vector<std::size_t>& c) {
    require_disjoint(a, b, "conditional_mutual_information");
    if (c.empty()) return mutual_information(j, a, b);
    require_disjoint(a, c, "conditional_mutual_information");
    require_disjoint(b, c, "conditional_mutual_information");
    const double h = entropy(j, sorted_union(a, c)) + entropy(j, sorted_union(b, c)) - entropy(j, c) -
                     entropy(j, sorted_union(sorted_union(a, b), c));
    return std::max(h, 0.0);
}

CapabilityReport is_more_capable(const Pmf& source, const Channel& ch_b, const Channel& ch_w,
                                 double margin) {
    if (source.alphabet() != ch_b.input() || source.alphabet() != ch_w.input()) {
        throw std::invalid_argument("is_more_capable: channels must share the source alphabet");
    }
    const double ixb = mutual_information(push_through(source, ch_b), {0}, {1});
    const double ixw = mutual_information(push_through(source, ch_w), {0}, {1});
    const double diff = ixb - ixw;
    CapabilityVerdict v = CapabilityVerdict::WithinMargin;
    if (diff > margin) v = CapabilityVerdict::StrictYes;
    else if (diff < -margin) v = CapabilityVerdict::StrictNo;
    return {v, ixb, ixw};
}

namespace {

// Joint over (X, B, W, V) from the conditionally independent construction.
JointPmf xbwv_joint(const Pmf& source, const Channel& ch_b, const Channel& ch_w, const Channel& ch_v) {
    JointPmf xb = push_through(source, ch_b);         // (X, B)
    JointPmf xbw = extend_with_channel(xb, {0}, ch_w);  // (X, B, W)
    return extend_with_channel(xbw, {0}, ch_v);         // (X, B, W, V)
}

}  // namespace

LessNoisyReport less_noisy_falsifier(const Pmf& source, const Channel& ch_b, const Channel& ch_w,
                                     int v_cardinality, int trials, std::uint64_t seed) {
    if (v_cardinality < 2) throw std::invalid_argument("less_noisy_falsifier: vCardinality must be >= 2");
    if (trials < 1) throw std::invalid_argument("less_noisy_falsifier: trials must be >= 1");

    const int nx = source.size();
    const int nv = v_cardinality;
    constexpr double kViolationTol = 1e-12;
    constexpr double kPositiveTol = 1e-9;

    LessNoisyReport report;

    auto consider = [&](const Channel& ch_v) {
        const JointPmf j = xbwv_joint(source, ch_b, ch_w, ch_v);
        const double ivb = mutual_information(j, {3}, {1});
        const double ivw = mutual_information(j, {3}, {2});
        if (ivb > kPositiveTol && ivb <= ivw + kViolationTol) {
            if (!report.counterexample_found || ivw - ivb > report.witness_i_v_w - report.witness_i_v_b) {
                report.counterexample_found = true;
                report.witness = ch_v;
                report.witness_i_v_b = ivb;
                report.witness_i_v_w = ivw;
            }
        } else if (ivb <= kPositiveTol && ivw > kPositiveTol && !report.zero_info_witness) {
            report.zero_info_witness = ch_v;
            report.zero_info_i_v_w = ivw;
        }
    };

    // Deterministic candidates first: every map from X into V (V = f(X) covers
    // the V = X case whenever nv >= nx).
    std::size_t n_maps = 1;
    for (int i = 0; i < nx; ++i) n_maps *= static_cast<std::size_t>(nv);
    const std::size_t map_cap = 4096;
    for (std::size_t code = 0; code < std::min(n_maps, map_cap); ++code) {
        std::vector<double> rows(static_cast<std::size_t>(nx) * nv, 0.0);
        std::size_t c = code;
        for (int x = 0; x < nx; ++x) {
            rows[static_cast<std::size_t>(x) * nv + static_cast<int>(c % nv)] = 1.0;
            c /= nv;
        }
        consider(Channel(Alphabet(nx), Alphabet(nv), std::move(rows)));
        if (report.counterexample_found) {
            report.trials_run = 0;
            return report;
        }
    }

    // Random rows: Dirichlet(1,...,1) per input symbol.
    CounterRng rng(seed, RngStream::Search);
    for (int t = 0; t < trials; ++t) {
        std::vector<double> rows(static_cast<std::size_t>(nx) * nv, 0.0);
        for (int x = 0; x < nx; ++x) {
            double total = 0.0;
            for (int v = 0; v < nv; ++v) {
                double u = rng.next_double();
                u = std::max(u, 1e-300);
                const double e = -std::log(u);
                rows[static_cast<std::size_t>(x) * nv + v] = e;
                total += e;
            }
            for (int v = 0; v < nv; ++v) rows[static_cast<std::size_t>(x) * nv + v] /= total;
        }
        consider(Channel(Alphabet(nx), Alphabet(nv), std::move(rows)));
        report.trials_run = t + 1;
        if (report.counterexample_found) return report;
    }
    return report;
}

bool is_markov_x_b_w(const JointPmf& xbw, double tol) {
    if (xbw.num_axes() != 3) throw std::invalid_argument("is_markov_x_b_w: joint must have coordinates (X,B,W)");
    return conditional_mutual_information(xbw, {0}, {2}, {1}) <= tol;
}

}  // namespace rdsec
