#ifndef QMEM_THREELEVEL_SUSCEPTIBILITY_HPP
#define QMEM_THREELEVEL_SUSCEPTIBILITY_HPP

#include <qmem/numcore/transfer.hpp>

namespace qmem {

enum class LambdaKind { eit, raman };

struct LambdaParams {
    double d = 1.0;
    double gamma = 1.0;
    double omega_c = 0.0;
    double big_delta = 0.0;
    double small_delta = 0.0;
};

struct SusceptibilityValue {
    /* L alpha~(omega), exact */
    cplx exponent;
    Warnings warnings;
};

inline TransferFunction lambda_transfer(LambdaKind k, const LambdaParams &p)
{
    if (k == LambdaKind::eit) {
        return eit_transfer(p.d, p.gamma, p.omega_c);
    }
    return raman_transfer(p.d, p.gamma, p.omega_c, p.big_delta, p.small_delta);
}

inline SusceptibilityValue susceptibility(LambdaKind k, double w,
                                          const LambdaParams &p)
{
    require(p.gamma > 0.0 && p.omega_c > 0.0,
            "susceptibility: Gamma and Omega must be positive");
    SusceptibilityValue v{lambda_transfer(k, p).exponent(w), {}};
    if (k == LambdaKind::raman && std::abs(p.big_delta) < 10.0 * p.gamma) {
        v.warnings.push_back({ErrorKind::RamanConditionViolated,
                              "one-photon detuning below 10 Gamma"});
    }
    return v;
}

/* transparency width Omega^2 / (4 Gamma) */
inline double eit_width(double omega_c, double gamma)
{
    return omega_c * omega_c / (4.0 * gamma);
}

/* Raman line width Omega^2 Gamma / (4 Delta^2) */
inline double raman_width(double omega_c, double gamma, double big_delta)
{
    return omega_c * omega_c * gamma / (4.0 * big_delta * big_delta);
}

/* light shift Omega^2 / (4 Delta) */
inline double light_shift(double omega_c, double big_delta)
{
    return omega_c * omega_c / (4.0 * big_delta);
}

} // namespace qmem

#endif
