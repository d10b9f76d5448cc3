#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdsec {

// Thrown when an enumeration or allocation would exceed the configured
// budget. Carries the requested size so callers can report it.
class ResourceLimitError : public std::runtime_error {
public:
    ResourceLimitError(const std::string& what, std::size_t requested)
        : std::runtime_error(what + " (requested " + std::to_string(requested) + " cells)"),
          requested_(requested) {}
    std::size_t requested() const { return requested_; }

private:
    std::size_t requested_;
};

// Finite alphabet, symbols indexed 0..size-1.
struct Alphabet {
    int size = 1;

    explicit Alphabet(int s = 1) : size(s) {
        if (s < 1) throw std::invalid_argument("Alphabet: size must be >= 1");
    }
    bool operator==(const Alphabet& o) const { return size == o.size; }
    bool operator!=(const Alphabet& o) const { return size != o.size; }
};

// Probability mass function over a finite alphabet. Immutable after
// construction. Entries must be nonnegative and sum to 1 within 1e-9;
// the constructor renormalizes to absorb float noise and rejects anything
// further off.
class Pmf {
public:
    Pmf(Alphabet alphabet, std::vector<double> probs);

    const Alphabet& alphabet() const { return alphabet_; }
    int size() const { return alphabet_.size; }
    double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& probs() const { return probs_; }

    static Pmf uniform(int size);
    static Pmf point_mass(int size, int symbol);
    // P(1) = p_one over a binary alphabet.
    static Pmf bernoulli(double p_one);

private:
    Alphabet alphabet_;
    std::vector<double> probs_;
};

// Joint pmf over a product of finite alphabets, stored dense row-major with
// the last coordinate fastest. Alphabets in this problem are tiny, so no
// sparse path.
class JointPmf {
public:
    JointPmf(std::vector<Alphabet> axes, std::vector<double> probs);

    const std::vector<Alphabet>& axes() const { return axes_; }
    std::size_t num_axes() const { return axes_.size(); }
    std::size_t cells() const { return probs_.size(); }
    const std::vector<double>& probs() const { return probs_; }
    double at_flat(std::size_t idx) const { return probs_[idx]; }
    double at(const std::vector<int>& coords) const { return probs_[flat_index(coords)]; }

    std::size_t flat_index(const std::vector<int>& coords) const;
    void unflatten(std::size_t idx, std::vector<int>& coords) const;
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    static JointPmf from_pmf(const Pmf& p);

private:
    std::vector<Alphabet> axes_;
    std::vector<double> probs_;
    std::vector<std::size_t> strides_;
};

// Row-stochastic kernel: one pmf per input symbol. Rows produced by
// conditioning on a zero-probability symbol are flagged undefined instead of
// being filled with an arbitrary pmf; reading such a row throws.
class Channel {
public:
    Channel(Alphabet input, Alphabet output, std::vector<double> rows);
    Channel(Alphabet input, std::vector<Pmf> rows);

    const Alphabet& input() const { return input_; }
    const Alphabet& output() const { return output_; }

    bool row_defined(int x) const { return defined_[static_cast<std::size_t>(x)] != 0; }
    bool all_rows_defined() const;

    double prob(int x, int y) const {
        require_defined(x);
        return rows_[static_cast<std::size_t>(x) * output_.size + y];
    }
    Pmf row(int x) const;

    static Channel identity(int size);
    // Binary symmetric channel with crossover beta.
    static Channel bsc(double beta);
    // Binary erasure channel; output symbol 2 is the erasure.
    static Channel bec(double alpha);
    // Construct with explicit undefined-row mask (used by condition()).
    static Channel with_undefined(Alphabet input, Alphabet output, std::vector<double> rows,
                                  std::vector<std::uint8_t> defined);

private:
    Channel() : input_(1), output_(1) {}
    void require_defined(int x) const;

    Alphabet input_;
    Alphabet output_;
    std::vector<double> rows_;           // dense |input| x |output|
    std::vector<std::uint8_t> defined_;  // per-row flag
};

// Nonnegative finite distortion matrix d(x, y).
class DistortionMeasure {
public:
    DistortionMeasure(int x_size, int y_size, std::vector<double> values);

    int x_size() const { return x_size_; }
    int y_size() const { return y_size_; }
    double operator()(int x, int y) const {
        return values_[static_cast<std::size_t>(x) * y_size_ + y];
    }
    double d_max() const { return d_max_; }

    static DistortionMeasure hamming(int size);

private:
    int x_size_;
    int y_size_;
    std::vector<double> values_;
    double d_max_;
};

// --- operations ------------------------------------------------------------

// Sums out all coordinates not in `keep`. Result coordinates follow the order
// given in `keep` (which must be distinct, in range and nonempty).
JointPmf marginal(const JointPmf& j, const std::vector<std::size_t>& keep);

// Conditions on the coordinates in `given` (strictly increasing). The channel
// input ranges over the product of the given axes (row-major in coordinate
// order), the output over the remaining axes in increasing coordinate order.
// Rows with zero conditioning probability are flagged undefined.
Channel condition(const JointPmf& j, const std::vector<std::size_t>& given);

// Joint over (input, output) with entries p(x) * c(y|x).
JointPmf push_through(const Pmf& p, const Channel& c);

// Appends one coordinate distributed per `c` applied to the product of the
// coordinates listed in `sources` (row-major in the order given).
JointPmf extend_with_channel(const JointPmf& j, const std::vector<std::size_t>& sources,
                             const Channel& c);

// n-fold product distribution. Throws ResourceLimitError when the dense table
// would exceed `max_cells`.
JointPmf iid_extend(const Pmf& p, int n, std::size_t max_cells = (std::size_t{1} << 26));

// Half the L1 distance; equals the sup-over-events definition on finite
// alphabets.
double total_variation(const JointPmf& p, const JointPmf& q);
double total_variation(const Pmf& p, const Pmf& q);

// Sum_{x,y} j(x,y) d(x,y) for a two-coordinate joint.
double expected_distortion(const JointPmf& j, const DistortionMeasure& d);

}  // namespace rdsec
