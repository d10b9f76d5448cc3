#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdsec/prob.hpp"
#include "rdsec/region.hpp"
#include "rdsec/rng.hpp"

namespace rdsec {

// Raised when the likelihood encoder sees zero likelihood for every message.
// Only possible when P(X|V) has structural zeros.
class EncodingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rates in bits per symbol for the two-layer codebook. rp/rs index the
// transmitted public and secret messages, rpp/rsp the virtual messages the
// legitimate decoder recovers from its side information.
struct SchemeRates {
    double rp = 0.0;
    double rpp = 0.0;
    double rs = 0.0;
    double rsp = 0.0;
    int n = 1;
};

struct CodebookSizes {
    std::size_t mp = 1, mpp = 1, ms = 1, msp = 1;
    std::size_t clouds() const { return mp * mpp; }
    std::size_t satellites_per_cloud() const { return ms * msp; }
    std::size_t messages() const { return mp * mpp * ms * msp; }
};

// 2^{n r} rounded to the nearest integer, floored at 1. The realized rate
// log2(size)/n is what validation sees.
CodebookSizes sizes_for(const SchemeRates& rates);
SchemeRates realized_rates(const SchemeRates& requested);

struct MessageTuple {
    std::size_t mp = 0, mpp = 0, ms = 0, msp = 0;
    bool operator==(const MessageTuple&) const = default;
};

// Two-layer random codebook: cloud words u^n indexed by (mp, mpp), satellite
// words v^n per cloud indexed by (ms, msp), each satellite drawn per-letter
// from P(V|U = u_t) of its cloud. Reproducible from the seed.
struct SuperpositionCodebook {
    int n = 1;
    Alphabet u_alphabet{1};
    Alphabet v_alphabet{1};
    CodebookSizes sizes;
    std::vector<std::vector<std::uint8_t>> u_words;  // sizes.clouds()
    std::vector<std::vector<std::uint8_t>> v_words;  // clouds * satellites_per_cloud
    std::uint64_t seed = 0;

    std::size_t cloud_index(std::size_t mp, std::size_t mpp) const { return mp * sizes.mpp + mpp; }
    std::size_t satellite_index(std::size_t ms, std::size_t msp) const { return ms * sizes.msp + msp; }
    const std::vector<std::uint8_t>& u_word(std::size_t mp, std::size_t mpp) const {
        return u_words[cloud_index(mp, mpp)];
    }
    const std::vector<std::uint8_t>& v_word(const MessageTuple& m) const {
        return v_words[cloud_index(m.mp, m.mpp) * sizes.satellites_per_cloud() +
                       satellite_index(m.ms, m.msp)];
    }
};

SuperpositionCodebook generate_codebook(const Pmf& p_u, const Channel& v_given_u,
                                        const SchemeRates& rates, std::uint64_t seed,
                                        std::size_t budget = (std::size_t{1} << 26));

// Selects a message with probability proportional to prod_t P(x_t | v_t(m)),
// computed in the log domain. Throws EncodingFailure when every message has
// zero likelihood.
MessageTuple likelihood_encode(const SuperpositionCodebook& cb, const std::vector<std::uint8_t>& x,
                               const Channel& x_given_v, CounterRng& rng);

// Maximum likelihood over the sub-codebook {v(mp, ap, ms, as)} through the
// memoryless channel b_given_v; ties break toward the lowest (ap, as).
std::pair<std::size_t, std::size_t> decode_legit(const SuperpositionCodebook& cb, std::size_t mp,
                                                 std::size_t ms, const std::vector<std::uint8_t>& b,
                                                 const Channel& b_given_v);

// Joint-channel variant scoring through P(B | U, V) with input index
// u * |V| + v.
std::pair<std::size_t, std::size_t> decode_legit_joint(const SuperpositionCodebook& cb, std::size_t mp,
                                                       std::size_t ms,
                                                       const std::vector<std::uint8_t>& b,
                                                       const Channel& b_given_uv);

// y_t = phi(v_t, b_t); phi indexed v * |B| + b.
std::vector<std::uint8_t> reconstruct(const SuperpositionCodebook& cb, std::size_t mp, std::size_t mpp,
                                      std::size_t ms, std::size_t msp,
                                      const std::vector<std::uint8_t>& b, const std::vector<int>& phi,
                                      int b_size);

struct EavesdropperInputs {
    Pmf p_x;
    Channel w_given_x;
    Channel x_given_v;
    DistortionMeasure dw;
};

struct EavesdropperEstimate {
    std::vector<std::uint8_t> z;
    double distortion = 0.0;  // exact conditional expected per-letter distortion
};

// The strongest eavesdropper: enumerates x^n exactly, computes the posterior
// given (mp, ms, w^n) through the likelihood encoder, and picks the per-letter
// optimal estimate. When condition_on_mpp is set the public virtual message is
// added to her conditioning (used to check that more conditioning never
// hurts her).
EavesdropperEstimate eavesdropper_optimal_estimate(const SuperpositionCodebook& cb, std::size_t mp,
                                                   std::size_t ms, const std::vector<std::uint8_t>& w,
                                                   const EavesdropperInputs& in,
                                                   std::size_t budget = (std::size_t{1} << 26),
                                                   bool condition_on_mpp = false, std::size_t mpp = 0);

struct TrialRecord {
    std::vector<std::uint8_t> x, b, w;
    MessageTuple chosen;
    std::size_t mpp_hat = 0, msp_hat = 0;
    std::vector<std::uint8_t> y;
    double db = 0.0;
    std::vector<std::uint8_t> z;
    double dw = 0.0;
};

struct RateCheck {
    bool ok = true;
    std::vector<std::string> warnings;
    // Realized-rate margins of the four code construction inequalities.
    double public_covering = 0.0;   // rp + rpp - I(U;X)
    double public_decoding = 0.0;   // I(U;B) - rpp
    double secret_covering = 0.0;   // rs + rsp - I(X;V|U)
    double secrecy_floor = 0.0;     // rsp - I(V;W|U)
    double secret_decoding = 0.0;   // I(V;B|U) - rsp
};

struct SchemeQuantities {
    double i_u_x = 0.0;
    double i_u_b = 0.0;
    double i_x_v_given_u = 0.0;
    double i_v_w_given_u = 0.0;
    double i_v_b_given_u = 0.0;
    double expected_db = 0.0;  // single-letter E[d_b(X, phi(V,B))]
};

SchemeQuantities scheme_quantities(const SystemSpec& spec, const AuxScheme& aux);

// Realized-rate check of the four construction inequalities. Constraints of a
// degenerate layer (single word, zero information) are vacuous.
RateCheck validate_rates(const SchemeQuantities& q, const SchemeRates& requested);

// Requested rates at a fraction of each feasible interval: rsp sits at
// margin_frac of (I(V;W|U), I(V;B|U)); the one-sided covering sums get the
// relative margin (1 + margin_frac); rpp defaults to zero so all public bits
// travel on the noiseless channel rather than through side-information
// decoding.
SchemeRates suggest_rates(const SchemeQuantities& q, int n, double margin_frac = 0.1);

struct TrialSummary {
    int n = 0;
    int trials = 0;
    double mean_db = 0.0;
    double mean_dw = 0.0;
    double decoder_error_rate = 0.0;
    double ci_db = 0.0;  // 95% normal half-width
    double ci_dw = 0.0;
    std::uint64_t seed = 0;
};

struct TrialsResult {
    std::vector<TrialRecord> records;
    TrialSummary summary;
    RateCheck rate_check;
    SchemeRates realized;
    SchemeQuantities quantities;
};

struct RunOptions {
    std::size_t budget = (std::size_t{1} << 26);
    int threads = 0;  // 0 -> hardware concurrency; result independent of it
    bool joint_decoder = false;
    // 0: one codebook for the whole run. k > 0: redraw the codebook every k
    // trials (codebook substream trial/k), estimating the random-coding
    // ensemble average instead of a single draw.
    int codebook_period = 0;
};

// Full end-to-end trials: sample (x,b,w), encode, decode, reconstruct, and
// run the exact eavesdropper per trial. Bit-reproducible from the seed.
TrialsResult run_trials(const SystemSpec& spec, const AuxScheme& aux, const SchemeRates& rates,
                        int trials, std::uint64_t seed, const RunOptions& opts = {});

struct SoftcoverResult {
    double mean_tv = 0.0;
    double std_tv = 0.0;  // sample standard deviation across codebooks
    std::vector<double> per_codebook;
};

// Exact induced distribution of a rate-R random codebook against the product
// target, averaged over codebooks.
SoftcoverResult softcover_tv(const Pmf& target, const Channel& x_given_v, const Pmf& p_v, double rate,
                             int n, int codebooks, std::uint64_t seed,
                             std::size_t budget = (std::size_t{1} << 26));

// Exact mixture output sum_w weight(w) prod_t P(x_t | w_t) over all x^n, for
// arbitrary word lists; the enumerator behind softcover_tv, exposed so its
// consistency can be checked against exhaustive word enumeration.
std::vector<double> induced_output_distribution(const std::vector<std::vector<std::uint8_t>>& words,
                                                const std::vector<double>& weights,
                                                const Channel& x_given_v, int n);

// Two-layer setup: x_given_uv has input index u * |V| + v; z_given_xuv has
// input index (x * |U| + u) * |V| + v.
struct Lemma2Setup {
    Pmf p_u;
    Channel v_given_u;
    Channel x_given_uv;
    Channel z_given_xuv;
};

// Exact total variation between the superposition-induced distribution over
// (m1, x^n, z^k) and its cloud-only idealization, averaged over codebooks.
// z applies to the first k coordinates.
SoftcoverResult superposition_softcover_tv(const Lemma2Setup& setup, double r1, double r2, int n, int k,
                                           int codebooks, std::uint64_t seed,
                                           std::size_t budget = (std::size_t{1} << 26));

}  // namespace rdsec
