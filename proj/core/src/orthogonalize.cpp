#include "comblink/orthogonalize.hpp"

#include <cmath>

namespace comblink {

namespace {

void ortho_pol(std::vector<cplx>& v) {
    const std::size_t n = v.size();
    double pii = 0.0, piq = 0.0;
    for (const cplx& s : v) {
        pii += s.real() * s.real();
        piq += s.real() * s.imag();
    }
    pii /= static_cast<double>(n);
    piq /= static_cast<double>(n);
    if (pii <= 0.0) throw dsp_error("gram_schmidt: zero-power I component");

    const double rho = piq / pii;  // projection of Q on I
    double pqq = 0.0;
    for (const cplx& s : v) {
        const double q = s.imag() - rho * s.real();
        pqq += q * q;
    }
    pqq /= static_cast<double>(n);
    if (pqq <= 0.0) throw dsp_error("gram_schmidt: degenerate Q component");

    const double gi = 1.0 / std::sqrt(pii);
    const double gq = 1.0 / std::sqrt(pqq);
    for (cplx& s : v) {
        const double i2 = s.real() * gi;
        const double q2 = (s.imag() - rho * s.real()) * gq;
        s = cplx(i2, q2);
    }
}

}  // namespace

Frame gram_schmidt(const Frame& frame) {
    frame.check();
    Frame out = frame;
    for (int p = 0; p < frame.pol_count(); ++p) ortho_pol(out.pol(p));
    return out;
}

}  // namespace comblink
