#include "comblink/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace comblink::fft {

namespace {

std::mutex plan_mutex;

fftw_plan get_plan(std::size_t n, int sign) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find({n, sign});
    if (it != cache.end()) return it->second;
    // Planned once on a scratch buffer; FFTW_UNALIGNED lets us execute on
    // arbitrary caller buffers via fftw_execute_dft.
    std::vector<cplx> scratch(n);
    fftw_plan p = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[{n, sign}] = p;
    return p;
}

}  // namespace

void forward(std::vector<cplx>& data) {
    if (data.empty()) return;
    fftw_plan p = get_plan(data.size(), FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

void inverse(std::vector<cplx>& data) {
    if (data.empty()) return;
    fftw_plan p = get_plan(data.size(), FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
    const double g = 1.0 / static_cast<double>(data.size());
    for (cplx& v : data) v *= g;
}

std::vector<cplx> forward_copy(const std::vector<cplx>& data) {
    std::vector<cplx> out(data);
    forward(out);
    return out;
}

double bin_freq(std::size_t k, std::size_t n, double sample_rate) {
    const double kk = (k <= n / 2) ? static_cast<double>(k)
                                   : static_cast<double>(k) - static_cast<double>(n);
    return kk * sample_rate / static_cast<double>(n);
}

}  // namespace comblink::fft
