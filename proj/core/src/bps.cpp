#include "comblink/bps.hpp"

#include <cmath>

namespace comblink {

BpsEngine::BpsEngine(const Constellation& c, int window, int test_angles,
                     std::size_t n_streams)
    : constellation_(&c), window_(window), n_angles_(test_angles),
      n_streams_(n_streams) {
    if (window < 1) throw config_error("BpsEngine: window must be >= 1");
    if (test_angles < 2) throw config_error("BpsEngine: need >= 2 test angles");
    if (n_streams < 1) throw config_error("BpsEngine: need >= 1 stream");
    rotators_.resize(n_angles_);
    angles_.resize(n_angles_);
    for (int b = 0; b < n_angles_; ++b) {
        angles_[b] = -M_PI / 4.0 + b * M_PI / (2.0 * n_angles_);
        rotators_[b] = std::polar(1.0, -angles_[b]);
    }
    ring_.assign(static_cast<std::size_t>(n_angles_) * window_, 0.0);
    window_sum_.assign(n_angles_, 0.0);
    ref_gain_ = std::max(8, window_ / 4);
}

double BpsEngine::push(std::span<const cplx> symbols) {
    if (symbols.size() != n_streams_)
        throw shape_error("BpsEngine: stream count mismatch");
    const Constellation& c = *constellation_;
    for (int b = 0; b < n_angles_; ++b) {
        double d = 0.0;
        for (std::size_t s = 0; s < n_streams_; ++s) {
            const cplx v = symbols[s] * rotators_[b];
            const cplx p = c.points[c.nearest_index(v)];
            d += std::norm(v - p);
        }
        double& slot = ring_[static_cast<std::size_t>(b) * window_ + pos_];
        window_sum_[b] += d - slot;
        slot = d;
    }
    evals_ += n_streams_ * static_cast<std::uint64_t>(n_angles_);
    pos_ = (pos_ + 1) % window_;

    int best = 0;
    for (int b = 1; b < n_angles_; ++b)
        if (window_sum_[b] < window_sum_[best]) best = b;

    // Unwrap against a smoothed reference rather than the single previous
    // estimate: an isolated argmin outlier then produces a transient
    // excursion instead of a permanent cycle slip.
    double est = angles_[best];
    if (have_prev_) {
        const double k = std::round((unwrap_ref_ - est) / (M_PI / 2.0));
        est += k * M_PI / 2.0;
        unwrap_ref_ += (est - unwrap_ref_) / static_cast<double>(ref_gain_);
    } else {
        unwrap_ref_ = est;
    }
    have_prev_ = true;
    return est;
}

PhaseTrace bps_estimate(const std::vector<std::span<const cplx>>& streams,
                        const Constellation& c, int window, int test_angles,
                        double symbol_rate, std::uint64_t* distance_evals) {
    if (streams.empty()) throw config_error("bps_estimate: no streams");
    const std::size_t n = streams.front().size();
    for (const auto& s : streams)
        if (s.size() != n) throw shape_error("bps_estimate: stream length mismatch");

    BpsEngine engine(c, window, test_angles, streams.size());
    PhaseTrace tr;
    tr.sample_rate = symbol_rate;
    tr.values.resize(n);
    std::vector<cplx> row(streams.size());
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t s = 0; s < streams.size(); ++s) row[s] = streams[s][k];
        tr.values[k] = engine.push(row);
    }
    if (distance_evals) *distance_evals = engine.distance_evals();
    return tr;
}

}  // namespace comblink
