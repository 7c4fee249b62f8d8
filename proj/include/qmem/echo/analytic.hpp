#ifndef QMEM_ECHO_ANALYTIC_HPP
#define QMEM_ECHO_ANALYTIC_HPP

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <qmem/numcore/error.hpp>

namespace qmem {

enum class EchoProtocol { tpe, crib_fwd, crib_bwd, rose_fwd };

inline EchoProtocol echo_protocol_from(const std::string &s)
{
    if (s == "2pe") return EchoProtocol::tpe;
    if (s == "crib_fwd") return EchoProtocol::crib_fwd;
    if (s == "crib_bwd") return EchoProtocol::crib_bwd;
    if (s == "rose_fwd") return EchoProtocol::rose_fwd;
    throw Error(ErrorKind::Validation, "unknown echo protocol '" + s + "'");
}

/* closed-form retrieval efficiencies */
inline double analytic_efficiency(EchoProtocol p, double d)
{
    require(d >= 0.0, "analytic_efficiency: d must be >= 0");
    switch (p) {
    case EchoProtocol::tpe: {
        double s = std::sinh(0.5 * d);
        return 4.0 * s * s;
    }
    case EchoProtocol::crib_fwd:
    case EchoProtocol::rose_fwd:
        return d * d * std::exp(-d);
    case EchoProtocol::crib_bwd: {
        double a = -std::expm1(-d);
        return a * a;
    }
    }
    return 0.0;
}

using Vec3 = std::array<double, 3>;

struct WaveVectorSet {
    Vec3 k1{1.0, 0.0, 0.0};
    Vec3 k2{1.0, 0.0, 0.0};
    Vec3 k3{1.0, 0.0, 0.0};

    void validate() const
    {
        for (const auto &k : {k1, k2, k3}) {
            double n = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            require(std::abs(n - 1.0) < 1e-9, "WaveVectorSet: vectors must be unit");
        }
    }
};

enum class PhaseMatchProtocol { tpe, rose };

/**
 * Echo wave vector 2 k2 - k1 (2PE) or k1 + 2 (k3 - k2) (ROSE); the echo is
 * emitted only when it has unit length.
 */
inline std::optional<Vec3> phase_match(PhaseMatchProtocol p,
                                       const WaveVectorSet &k)
{
    k.validate();
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        v[i] = p == PhaseMatchProtocol::tpe ? 2.0 * k.k2[i] - k.k1[i]
                                            : k.k1[i] + 2.0 * (k.k3[i] - k.k2[i]);
    }
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (std::abs(n - 1.0) <= 1e-9) {
        return v;
    }
    return std::nullopt;
}

struct AreaSample {
    double z;
    double theta;
};

/* RK4 solution of d theta/dz = -(d/2) sin theta on z in [0, 1] */
inline std::vector<AreaSample> area_theorem_reference(double theta0, double d,
                                                      std::size_t nz = 200)
{
    require(theta0 >= 0.0 && theta0 <= 2.0 * 3.141592653589793 + 1e-12,
            "area_theorem_reference: theta0 must lie in [0, 2 pi]");
    require(nz >= 1, "area_theorem_reference: nz must be >= 1");
    auto f = [d](double th) { return -0.5 * d * std::sin(th); };
    const double h = 1.0 / static_cast<double>(nz);
    std::vector<AreaSample> out{{0.0, theta0}};
    double th = theta0;
    for (std::size_t j = 0; j < nz; ++j) {
        double k1 = f(th);
        double k2 = f(th + 0.5 * h * k1);
        double k3 = f(th + 0.5 * h * k2);
        double k4 = f(th + h * k3);
        th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back({h * static_cast<double>(j + 1), th});
    }
    return out;
}

} // namespace qmem

#endif
