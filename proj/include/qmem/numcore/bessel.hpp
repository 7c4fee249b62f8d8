#ifndef QMEM_NUMCORE_BESSEL_HPP
#define QMEM_NUMCORE_BESSEL_HPP

#include <cmath>

#include <qmem/numcore/grid.hpp>

namespace qmem {

/* J1 by power series up to x = 12, Hankel asymptotic expansion beyond */
inline double bessel_j1(double x)
{
    if (x < 0.0) {
        return -bessel_j1(-x);
    }
    if (x <= 12.0) {
        double h = 0.5 * x;
        double term = h;
        double sum = term;
        for (int k = 1; k < 60; ++k) {
            term *= -h * h / (static_cast<double>(k) * (k + 1));
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }
    /* P, Q series for nu = 1, mu = 4 */
    const double mu = 4.0;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1e300;
    for (int k = 1; k < 30; ++k) {
        double a = 2.0 * k - 1.0;
        term *= (mu - a * a) / (static_cast<double>(k) * 8.0 * x);
        if (std::abs(term) > last) {
            break;
        }
        last = std::abs(term);
        /* k odd -> Q, k even -> P, with alternating signs */
        int r = k % 4;
        if (r == 1) {
            q += term;
        } else if (r == 2) {
            p -= term;
        } else if (r == 3) {
            q -= term;
        } else {
            p += term;
        }
    }
    double chi = x - 0.75 * pi;
    return std::sqrt(2.0 / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

/**
 * Retarded part K(t) of the Lorentzian-absorber impulse response,
 * F(t) = delta(t) - K(t). damped = true gives the exact inverse of
 * exp(-(d/2) G0/(G0 + i w)); damped = false the first-order form
 * d G0 J1(x)/x, x = sqrt(2 d G0 t).
 */
inline double lorentzian_kernel(double d, double gamma0, double t,
                                bool damped = true)
{
    if (t < 0.0) {
        return 0.0;
    }
    double x = std::sqrt(2.0 * d * gamma0 * t);
    double r = x < 1e-8 ? 0.5 : bessel_j1(x) / x;
    double k = d * gamma0 * r;
    if (damped) {
        k *= std::exp(-gamma0 * t);
    }
    return k;
}

/* E_out(t) = E(t) - int_0^inf K(s) E(t - s) ds, trapezoid in s */
inline ComplexEnvelope convolve_lorentzian(const ComplexEnvelope &in, double d,
                                           double gamma0, bool damped = true)
{
    const auto n = in.size();
    const double dt = in.grid.dt;
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        k[j] = lorentzian_kernel(d, gamma0, dt * static_cast<double>(j), damped);
    }
    ComplexEnvelope out(in.grid);
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = 0.5 * k[0] * in[i];
        for (std::size_t j = 1; j <= i; ++j) {
            acc += k[j] * in[i - j];
        }
        out[i] = in[i] - acc * dt;
    }
    return out;
}

} // namespace qmem

#endif
