#include "rdsec/prob.hpp"

#include <algorithm>
#include <cmath>

#include "rdsec/numeric.hpp"

namespace rdsec {

namespace {

constexpr double kSumTolerance = 1e-9;

void validate_mass(const std::vector<double>& probs, const char* what) {
    NeumaierSum s;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument(std::string(what) + ": entries must be finite and >= 0");
        }
        s.add(p);
    }
    if (std::abs(s.value() - 1.0) > kSumTolerance) {
        throw std::invalid_argument(std::string(what) + ": entries must sum to 1 within 1e-9, got " +
                                    std::to_string(s.value()));
    }
}

void renormalize(std::vector<double>& probs) {
    NeumaierSum s;
    for (double p : probs) s.add(p);
    const double total = s.value();
    for (double& p : probs) p /= total;
}

}  // namespace

// --- Pmf --------------------------------------------------------------------

Pmf::Pmf(Alphabet alphabet, std::vector<double> probs) : alphabet_(alphabet), probs_(std::move(probs)) {
    if (probs_.size() != static_cast<std::size_t>(alphabet_.size)) {
        throw std::invalid_argument("Pmf: length must equal alphabet size");
    }
    validate_mass(probs_, "Pmf");
    renormalize(probs_);
}

Pmf Pmf::uniform(int size) {
    return Pmf(Alphabet(size), std::vector<double>(static_cast<std::size_t>(size), 1.0 / size));
}

Pmf Pmf::point_mass(int size, int symbol) {
    if (symbol < 0 || symbol >= size) throw std::invalid_argument("Pmf::point_mass: symbol out of range");
    std::vector<double> v(static_cast<std::size_t>(size), 0.0);
    v[static_cast<std::size_t>(symbol)] = 1.0;
    return Pmf(Alphabet(size), std::move(v));
}

Pmf Pmf::bernoulli(double p_one) {
    if (!(p_one >= 0.0 && p_one <= 1.0)) throw std::invalid_argument("Pmf::bernoulli: p outside [0,1]");
    return Pmf(Alphabet(2), {1.0 - p_one, p_one});
}

// --- JointPmf ----------------------------------------------------------------

JointPmf::JointPmf(std::vector<Alphabet> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
    if (axes_.empty()) throw std::invalid_argument("JointPmf: needs at least one axis");
    std::size_t cells = 1;
    for (const Alphabet& a : axes_) cells *= static_cast<std::size_t>(a.size);
    if (probs_.size() != cells) {
        throw std::invalid_argument("JointPmf: prob table size does not match axes");
    }
    validate_mass(probs_, "JointPmf");
    renormalize(probs_);
    strides_.assign(axes_.size(), 1);
    for (std::size_t i = axes_.size(); i-- > 1;) {
        strides_[i - 1] = strides_[i] * static_cast<std::size_t>(axes_[i].size);
    }
}

std::size_t JointPmf::flat_index(const std::vector<int>& coords) const {
    if (coords.size() != axes_.size()) throw std::invalid_argument("JointPmf: coordinate arity mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= axes_[i].size) {
            throw std::invalid_argument("JointPmf: coordinate out of range");
        }
        idx += strides_[i] * static_cast<std::size_t>(coords[i]);
    }
    return idx;
}

void JointPmf::unflatten(std::size_t idx, std::vector<int>& coords) const {
    coords.resize(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        coords[i] = static_cast<int>(idx / strides_[i]);
        idx %= strides_[i];
    }
}

JointPmf JointPmf::from_pmf(const Pmf& p) {
    return JointPmf({p.alphabet()}, p.probs());
}

// --- Channel ------------------------------------------------------------------

Channel::Channel(Alphabet input, Alphabet output, std::vector<double> rows)
    : input_(input), output_(output), rows_(std::move(rows)) {
    const std::size_t expect = static_cast<std::size_t>(input_.size) * output_.size;
    if (rows_.size() != expect) throw std::invalid_argument("Channel: row table size mismatch");
    defined_.assign(static_cast<std::size_t>(input_.size), 1);
    for (int x = 0; x < input_.size; ++x) {
        std::vector<double> row(rows_.begin() + static_cast<std::ptrdiff_t>(x) * output_.size,
                                rows_.begin() + static_cast<std::ptrdiff_t>(x + 1) * output_.size);
        validate_mass(row, "Channel row");
        renormalize(row);
        std::copy(row.begin(), row.end(), rows_.begin() + static_cast<std::ptrdiff_t>(x) * output_.size);
    }
}

Channel::Channel(Alphabet input, std::vector<Pmf> rows) : input_(input), output_(1) {
    if (rows.empty() || rows.size() != static_cast<std::size_t>(input.size)) {
        throw std::invalid_argument("Channel: need one row per input symbol");
    }
    output_ = rows.front().alphabet();
    rows_.reserve(rows.size() * static_cast<std::size_t>(output_.size));
    for (const Pmf& r : rows) {
        if (r.alphabet() != output_) throw std::invalid_argument("Channel: rows must share one alphabet");
        rows_.insert(rows_.end(), r.probs().begin(), r.probs().end());
    }
    defined_.assign(static_cast<std::size_t>(input_.size), 1);
}

Channel Channel::with_undefined(Alphabet input, Alphabet output, std::vector<double> rows,
                                std::vector<std::uint8_t> defined) {
    Channel c;
    c.input_ = input;
    c.output_ = output;
    c.rows_ = std::move(rows);
    c.defined_ = std::move(defined);
    const std::size_t expect = static_cast<std::size_t>(input.size) * output.size;
    if (c.rows_.size() != expect || c.defined_.size() != static_cast<std::size_t>(input.size)) {
        throw std::invalid_argument("Channel: row table size mismatch");
    }
    for (int x = 0; x < input.size; ++x) {
        if (!c.defined_[static_cast<std::size_t>(x)]) continue;
        std::vector<double> row(c.rows_.begin() + static_cast<std::ptrdiff_t>(x) * output.size,
                                c.rows_.begin() + static_cast<std::ptrdiff_t>(x + 1) * output.size);
        validate_mass(row, "Channel row");
        renormalize(row);
        std::copy(row.begin(), row.end(), c.rows_.begin() + static_cast<std::ptrdiff_t>(x) * output.size);
    }
    return c;
}

void Channel::require_defined(int x) const {
    if (x < 0 || x >= input_.size) throw std::invalid_argument("Channel: input symbol out of range");
    if (!defined_[static_cast<std::size_t>(x)]) {
        throw std::logic_error("Channel: row " + std::to_string(x) +
                               " is undefined (zero-probability conditioning symbol)");
    }
}

bool Channel::all_rows_defined() const {
    return std::all_of(defined_.begin(), defined_.end(), [](std::uint8_t d) { return d != 0; });
}

Pmf Channel::row(int x) const {
    require_defined(x);
    std::vector<double> r(rows_.begin() + static_cast<std::ptrdiff_t>(x) * output_.size,
                          rows_.begin() + static_cast<std::ptrdiff_t>(x + 1) * output_.size);
    return Pmf(output_, std::move(r));
}

Channel Channel::identity(int size) {
    std::vector<double> rows(static_cast<std::size_t>(size) * size, 0.0);
    for (int i = 0; i < size; ++i) rows[static_cast<std::size_t>(i) * size + i] = 1.0;
    return Channel(Alphabet(size), Alphabet(size), std::move(rows));
}

Channel Channel::bsc(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("bsc: beta outside [0,1]");
    return Channel(Alphabet(2), Alphabet(2), {1.0 - beta, beta, beta, 1.0 - beta});
}

Channel Channel::bec(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("bec: alpha outside [0,1]");
    return Channel(Alphabet(2), Alphabet(3), {1.0 - alpha, 0.0, alpha, 0.0, 1.0 - alpha, alpha});
}

// --- DistortionMeasure ---------------------------------------------------------

DistortionMeasure::DistortionMeasure(int x_size, int y_size, std::vector<double> values)
    : x_size_(x_size), y_size_(y_size), values_(std::move(values)) {
    if (x_size_ < 1 || y_size_ < 1) throw std::invalid_argument("DistortionMeasure: empty alphabet");
    if (values_.size() != static_cast<std::size_t>(x_size_) * y_size_) {
        throw std::invalid_argument("DistortionMeasure: matrix size mismatch");
    }
    d_max_ = 0.0;
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("DistortionMeasure: entries must be finite and >= 0");
        }
        d_max_ = std::max(d_max_, v);
    }
}

DistortionMeasure DistortionMeasure::hamming(int size) {
    std::vector<double> v(static_cast<std::size_t>(size) * size, 1.0);
    for (int i = 0; i < size; ++i) v[static_cast<std::size_t>(i) * size + i] = 0.0;
    return DistortionMeasure(size, size, std::move(v));
}

// --- operations -----------------------------------------------------------------

namespace {

void check_coord_set(const JointPmf& j, const std::vector<std::size_t>& coords, const char* what,
                     bool require_increasing = false) {
    if (coords.empty()) throw std::invalid_argument(std::string(what) + ": empty coordinate set");
    std::vector<bool> seen(j.num_axes(), false);
    std::size_t prev = 0;
    bool first = true;
    for (std::size_t c : coords) {
        if (c >= j.num_axes()) throw std::invalid_argument(std::string(what) + ": coordinate out of range");
        if (seen[c]) throw std::invalid_argument(std::string(what) + ": duplicate coordinate");
        if (require_increasing && !first && c <= prev) {
            throw std::invalid_argument(std::string(what) + ": coordinates must be strictly increasing");
        }
        seen[c] = true;
        prev = c;
        first = false;
    }
}

}  // namespace

JointPmf marginal(const JointPmf& j, const std::vector<std::size_t>& keep) {
    check_coord_set(j, keep, "marginal");

    std::vector<Alphabet> out_axes;
    out_axes.reserve(keep.size());
    for (std::size_t c : keep) out_axes.push_back(j.axes()[c]);

    std::size_t out_cells = 1;
    for (const Alphabet& a : out_axes) out_cells *= static_cast<std::size_t>(a.size);

    std::vector<std::size_t> out_strides(keep.size(), 1);
    for (std::size_t i = keep.size(); i-- > 1;) {
        out_strides[i - 1] = out_strides[i] * static_cast<std::size_t>(out_axes[i].size);
    }

    std::vector<double> out(out_cells, 0.0);
    std::vector<int> coords;
    for (std::size_t idx = 0; idx < j.cells(); ++idx) {
        const double p = j.at_flat(idx);
        if (p == 0.0) continue;
        j.unflatten(idx, coords);
        std::size_t o = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            o += out_strides[i] * static_cast<std::size_t>(coords[keep[i]]);
        }
        out[o] += p;
    }
    return JointPmf(std::move(out_axes), std::move(out));
}

Channel condition(const JointPmf& j, const std::vector<std::size_t>& given) {
    check_coord_set(j, given, "condition", /*require_increasing=*/true);
    if (given.size() == j.num_axes()) {
        throw std::invalid_argument("condition: cannot condition on every coordinate");
    }

    std::vector<std::size_t> rest;
    for (std::size_t c = 0; c < j.num_axes(); ++c) {
        if (std::find(given.begin(), given.end(), c) == given.end()) rest.push_back(c);
    }

    std::size_t in_size = 1;
    for (std::size_t c : given) in_size *= static_cast<std::size_t>(j.axes()[c].size);
    std::size_t out_size = 1;
    for (std::size_t c : rest) out_size *= static_cast<std::size_t>(j.axes()[c].size);

    std::vector<std::size_t> in_strides(given.size(), 1);
    for (std::size_t i = given.size(); i-- > 1;) {
        in_strides[i - 1] = in_strides[i] * static_cast<std::size_t>(j.axes()[given[i]].size);
    }
    std::vector<std::size_t> out_strides(rest.size(), 1);
    for (std::size_t i = rest.size(); i-- > 1;) {
        out_strides[i - 1] = out_strides[i] * static_cast<std::size_t>(j.axes()[rest[i]].size);
    }

    std::vector<double> rows(in_size * out_size, 0.0);
    std::vector<double> mass(in_size, 0.0);
    std::vector<int> coords;
    for (std::size_t idx = 0; idx < j.cells(); ++idx) {
        const double p = j.at_flat(idx);
        j.unflatten(idx, coords);
        std::size_t gi = 0;
        for (std::size_t i = 0; i < given.size(); ++i) {
            gi += in_strides[i] * static_cast<std::size_t>(coords[given[i]]);
        }
        std::size_t ri = 0;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            ri += out_strides[i] * static_cast<std::size_t>(coords[rest[i]]);
        }
        rows[gi * out_size + ri] += p;
        mass[gi] += p;
    }

    std::vector<std::uint8_t> defined(in_size, 1);
    for (std::size_t gi = 0; gi < in_size; ++gi) {
        if (mass[gi] == 0.0) {
            defined[gi] = 0;
            continue;
        }
        for (std::size_t ri = 0; ri < out_size; ++ri) rows[gi * out_size + ri] /= mass[gi];
    }
    return Channel::with_undefined(Alphabet(static_cast<int>(in_size)), Alphabet(static_cast<int>(out_size)),
                                   std::move(rows), std::move(defined));
}

JointPmf push_through(const Pmf& p, const Channel& c) {
    if (p.alphabet() != c.input()) throw std::invalid_argument("push_through: alphabet mismatch");
    const int nx = p.size();
    const int ny = c.output().size;
    std::vector<double> out(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int x = 0; x < nx; ++x) {
        if (p[x] == 0.0) continue;
        if (!c.row_defined(x)) {
            throw std::invalid_argument("push_through: input mass on an undefined channel row");
        }
        for (int y = 0; y < ny; ++y) {
            out[static_cast<std::size_t>(x) * ny + y] = p[x] * c.prob(x, y);
        }
    }
    return JointPmf({p.alphabet(), c.output()}, std::move(out));
}

JointPmf extend_with_channel(const JointPmf& j, const std::vector<std::size_t>& sources, const Channel& c) {
    check_coord_set(j, sources, "extend_with_channel");
    std::size_t src_size = 1;
    for (std::size_t s : sources) src_size *= static_cast<std::size_t>(j.axes()[s].size);
    if (src_size != static_cast<std::size_t>(c.input().size)) {
        throw std::invalid_argument("extend_with_channel: channel input does not match source coordinates");
    }
    std::vector<std::size_t> src_strides(sources.size(), 1);
    for (std::size_t i = sources.size(); i-- > 1;) {
        src_strides[i - 1] = src_strides[i] * static_cast<std::size_t>(j.axes()[sources[i]].size);
    }

    const int ny = c.output().size;
    std::vector<Alphabet> out_axes = j.axes();
    out_axes.push_back(c.output());
    std::vector<double> out(j.cells() * static_cast<std::size_t>(ny), 0.0);
    std::vector<int> coords;
    for (std::size_t idx = 0; idx < j.cells(); ++idx) {
        const double p = j.at_flat(idx);
        if (p == 0.0) continue;
        j.unflatten(idx, coords);
        std::size_t si = 0;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            si += src_strides[i] * static_cast<std::size_t>(coords[sources[i]]);
        }
        if (!c.row_defined(static_cast<int>(si))) {
            throw std::invalid_argument("extend_with_channel: mass on an undefined channel row");
        }
        for (int y = 0; y < ny; ++y) {
            out[idx * static_cast<std::size_t>(ny) + y] = p * c.prob(static_cast<int>(si), y);
        }
    }
    return JointPmf(std::move(out_axes), std::move(out));
}

JointPmf iid_extend(const Pmf& p, int n, std::size_t max_cells) {
    if (n < 1) throw std::invalid_argument("iid_extend: n must be >= 1");
    const std::size_t base = static_cast<std::size_t>(p.size());
    std::size_t cells = 1;
    for (int i = 0; i < n; ++i) {
        if (cells > max_cells / base) {
            // Overflow-safe: compute the requested size approximately for the message.
            std::size_t req = cells;
            for (int k = i; k < n && req < (std::size_t{1} << 62); ++k) req *= base;
            throw ResourceLimitError("iid_extend: table exceeds memory budget", req);
        }
        cells *= base;
    }
    if (cells > max_cells) throw ResourceLimitError("iid_extend: table exceeds memory budget", cells);

    std::vector<Alphabet> axes(static_cast<std::size_t>(n), p.alphabet());
    std::vector<double> out(cells, 1.0);
    // Last axis fastest: symbol of coordinate t at index idx is
    // (idx / base^(n-1-t)) % base.
    std::size_t stride = 1;
    for (int t = n - 1; t >= 0; --t) {
        for (std::size_t idx = 0; idx < cells; ++idx) {
            out[idx] *= p[static_cast<int>((idx / stride) % base)];
        }
        stride *= base;
    }
    return JointPmf(std::move(axes), std::move(out));
}

double total_variation(const JointPmf& p, const JointPmf& q) {
    if (p.axes().size() != q.axes().size()) throw std::invalid_argument("total_variation: axis mismatch");
    for (std::size_t i = 0; i < p.axes().size(); ++i) {
        if (p.axes()[i] != q.axes()[i]) throw std::invalid_argument("total_variation: axis mismatch");
    }
    NeumaierSum s;
    for (std::size_t idx = 0; idx < p.cells(); ++idx) {
        s.add(std::abs(p.at_flat(idx) - q.at_flat(idx)));
    }
    return 0.5 * s.value();
}

double total_variation(const Pmf& p, const Pmf& q) {
    return total_variation(JointPmf::from_pmf(p), JointPmf::from_pmf(q));
}

double expected_distortion(const JointPmf& j, const DistortionMeasure& d) {
    if (j.num_axes() != 2) throw std::invalid_argument("expected_distortion: joint must have two coordinates");
    if (j.axes()[0].size != d.x_size() || j.axes()[1].size != d.y_size()) {
        throw std::invalid_argument("expected_distortion: shape mismatch");
    }
    NeumaierSum s;
    const int ny = d.y_size();
    for (int x = 0; x < d.x_size(); ++x) {
        for (int y = 0; y < ny; ++y) {
            s.add(j.at_flat(static_cast<std::size_t>(x) * ny + y) * d(x, y));
        }
    }
    return s.value();
}

}  // namespace rdsec
