#ifndef QMEM_NUMCORE_TRANSFER_HPP
#define QMEM_NUMCORE_TRANSFER_HPP

#include <qmem/numcore/fourier.hpp>

namespace qmem {

enum class TransferKind { inverted_lorentzian, lorentzian, eit, raman };

/**
 * Linear medium response exp(L alpha~(omega)) with L = 1, alpha = d.
 * gamma0 is used by the two archetypes; gamma, omega_c, big_delta,
 * small_delta by the Lambda-system kinds.
 */
struct TransferFunction {
    TransferKind kind = TransferKind::inverted_lorentzian;
    double d = 0.0;
    double gamma0 = 1.0;
    double gamma = 1.0;
    double omega_c = 0.0;
    double big_delta = 0.0;
    double small_delta = 0.0;

    /* L alpha~(omega) */
    cplx exponent(double w) const
    {
        const cplx I(0.0, 1.0);
        switch (kind) {
        case TransferKind::inverted_lorentzian:
            return -0.5 * d * I * w / (gamma0 + I * w);
        case TransferKind::lorentzian:
            return -0.5 * d * gamma0 / (gamma0 + I * w);
        case TransferKind::eit: {
            if (w == 0.0) {
                return {};
            }
            cplx den = I * w + gamma - I * omega_c * omega_c / (4.0 * w);
            return -0.5 * d * gamma / den;
        }
        case TransferKind::raman: {
            if (w == small_delta) {
                return {};
            }
            cplx den = I * w - I * big_delta + gamma -
                I * omega_c * omega_c / (4.0 * (w - small_delta));
            return -0.5 * d * gamma / den;
        }
        }
        return {};
    }

    cplx response(double w) const { return std::exp(exponent(w)); }
};

inline TransferFunction inverted_lorentzian(double d, double gamma0)
{
    TransferFunction tf;
    tf.kind = TransferKind::inverted_lorentzian;
    tf.d = d;
    tf.gamma0 = gamma0;
    return tf;
}

inline TransferFunction lorentzian(double d, double gamma0)
{
    TransferFunction tf;
    tf.kind = TransferKind::lorentzian;
    tf.d = d;
    tf.gamma0 = gamma0;
    return tf;
}

inline TransferFunction eit_transfer(double d, double gamma, double omega_c)
{
    TransferFunction tf;
    tf.kind = TransferKind::eit;
    tf.d = d;
    tf.gamma = gamma;
    tf.omega_c = omega_c;
    return tf;
}

inline TransferFunction raman_transfer(double d, double gamma, double omega_c,
                                       double big_delta, double small_delta)
{
    TransferFunction tf;
    tf.kind = TransferKind::raman;
    tf.d = d;
    tf.gamma = gamma;
    tf.omega_c = omega_c;
    tf.big_delta = big_delta;
    tf.small_delta = small_delta;
    return tf;
}

/* fraction of spectral energy in the outer eighth of the band */
inline double edge_spectral_fraction(const Spectrum &s)
{
    const auto n = s.grid.n;
    double tot = 0.0;
    double edge = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double e = std::norm(s.values[k]);
        tot += e;
        if (k > 3 * n / 8 && k < 5 * n / 8) {
            edge += e;
        }
    }
    return tot > 0.0 ? edge / tot : 0.0;
}

/**
 * Propagates env through the linear medium in the frequency domain,
 * dropping the free-space retardation.
 */
inline ComplexEnvelope apply_transfer(const ComplexEnvelope &env,
                                      const TransferFunction &tf)
{
    auto spec = forward_transform(env);
    if (edge_spectral_fraction(spec) > 1e-6) {
        throw Error(ErrorKind::AliasRisk,
                    "input spectrum reaches the grid Nyquist band");
    }
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        spec.values[k] *= tf.response(spec.omega(k));
    }
    auto out = inverse_transform(spec);
    double peak = std::sqrt(out.peak_intensity());
    if (peak > 0.0) {
        const std::size_t m = 4;
        double edge = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            edge = std::max(edge, std::abs(out[i]));
            edge = std::max(edge, std::abs(out[out.size() - 1 - i]));
        }
        if (edge > 1e-4 * peak) {
            throw Error(ErrorKind::AliasRisk,
                        "transfer output wraps around the grid");
        }
    }
    return out;
}

} // namespace qmem

#endif
