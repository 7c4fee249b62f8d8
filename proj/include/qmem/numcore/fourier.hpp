#ifndef QMEM_NUMCORE_FOURIER_HPP
#define QMEM_NUMCORE_FOURIER_HPP

#include <cstring>
#include <mutex>

#include <fftw3.h>

#include <qmem/numcore/grid.hpp>

namespace qmem {

/**
 * Spectral samples in FFT order: values[k] = f~(omega_k) with
 * f~(w) = int f(t) exp(-i w t) dt.
 */
struct Spectrum {
    TimeGrid grid;
    std::vector<cplx> values;

    double omega(std::size_t k) const { return grid.omega(k); }

    /* (1/2pi) int |f~|^2 dw */
    double energy() const
    {
        double acc = 0.0;
        for (const auto &v : values) {
            acc += std::norm(v);
        }
        return acc * grid.domega() / (2.0 * pi);
    }
};

namespace detail {

inline std::mutex &fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/* unnormalized DFT, sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1) */
inline std::vector<cplx> dft(const std::vector<cplx> &in, int sign)
{
    const auto n = in.size();
    auto *buf = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                FFTW_ESTIMATE);
    }
    std::memcpy(static_cast<void *>(buf), in.data(), sizeof(fftw_complex) * n);
    fftw_execute(plan);
    std::vector<cplx> out(n);
    std::memcpy(static_cast<void *>(out.data()), buf, sizeof(fftw_complex) * n);
    {
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

} // namespace detail

inline Spectrum forward_transform(const ComplexEnvelope &env)
{
    env.grid.validate();
    const auto &g = env.grid;
    Spectrum s{g, detail::dft(env.samples, FFTW_FORWARD)};
    for (std::size_t k = 0; k < g.n; ++k) {
        s.values[k] *= g.dt * std::polar(1.0, -g.omega(k) * g.t0);
    }
    return s;
}

inline ComplexEnvelope inverse_transform(const Spectrum &spec)
{
    const auto &g = spec.grid;
    std::vector<cplx> tmp(g.n);
    for (std::size_t k = 0; k < g.n; ++k) {
        tmp[k] = spec.values[k] * std::polar(1.0, spec.omega(k) * g.t0);
    }
    auto out = detail::dft(tmp, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(g.n) * g.dt);
    for (auto &v : out) {
        v *= scale;
    }
    return ComplexEnvelope(g, std::move(out));
}

} // namespace qmem

#endif
