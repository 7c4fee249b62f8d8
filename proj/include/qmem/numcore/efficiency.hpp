#ifndef QMEM_NUMCORE_EFFICIENCY_HPP
#define QMEM_NUMCORE_EFFICIENCY_HPP

#include <algorithm>

#include <qmem/numcore/grid.hpp>

namespace qmem {

/**
 * Red-minus-blue shaded area: energy of output after cut minus energy of
 * input after cut, both normalized by the input energy, clamped to [0,1].
 */
inline double shaded_area_efficiency(const ComplexEnvelope &input,
                                     const ComplexEnvelope &output, double cut)
{
    require(input.grid == output.grid,
            "shaded_area_efficiency: envelopes on different grids");
    double ein = input.energy();
    require(ein > 0.0, "shaded_area_efficiency: zero input energy");
    double te = input.grid.t_end();
    double v = (output.energy(cut, te) - input.energy(cut, te)) / ein;
    return std::clamp(v, 0.0, 1.0);
}

/* sum a(t) conj(b(s - t)) dt: overlap with the time-reversed copy */
inline cplx flipped_overlap(const ComplexEnvelope &a, const ComplexEnvelope &b,
                            double s)
{
    cplx acc(0.0, 0.0);
    const auto &g = a.grid;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double tb = s - g.time(i);
        double x = (tb - g.t0) / g.dt;
        if (x < 0.0 || x > static_cast<double>(g.n - 1)) {
            continue;
        }
        auto j = static_cast<std::size_t>(x);
        double f = x - static_cast<double>(j);
        cplx bv = b[j];
        if (j + 1 < g.n) {
            bv = (1.0 - f) * b[j] + f * b[j + 1];
        }
        acc += a[i] * std::conj(bv);
    }
    return acc * g.dt;
}

/* sum a(t) conj(b(t - s)) dt */
inline cplx shifted_overlap(const ComplexEnvelope &a, const ComplexEnvelope &b,
                            double s)
{
    cplx acc(0.0, 0.0);
    const auto &g = a.grid;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double tb = g.time(i) - s;
        double x = (tb - g.t0) / g.dt;
        if (x < 0.0 || x > static_cast<double>(g.n - 1)) {
            continue;
        }
        auto j = static_cast<std::size_t>(x);
        double f = x - static_cast<double>(j);
        cplx bv = b[j];
        if (j + 1 < g.n) {
            bv = (1.0 - f) * b[j] + f * b[j + 1];
        }
        acc += a[i] * std::conj(bv);
    }
    return acc * g.dt;
}

struct CorrelationPeak {
    double shift;
    /* |overlap| / sqrt(Ea Eb) */
    double normalized;
};

/* scan s over the sample grid of [s0, s1] */
template <class Overlap>
CorrelationPeak correlation_peak(const ComplexEnvelope &a,
                                 const ComplexEnvelope &b, double s0,
                                 double s1, Overlap f)
{
    CorrelationPeak best{s0, -1.0};
    double norm = std::sqrt(a.energy() * b.energy());
    const double ds = a.grid.dt;
    for (double s = s0; s <= s1 + 0.5 * ds; s += ds) {
        double v = std::abs(f(a, b, s)) / norm;
        if (v > best.normalized) {
            best = {s, v};
        }
    }
    return best;
}

/* relative L2 distance |a - b|^2 / |b|^2 over [ta, tb] */
inline double relative_l2(const ComplexEnvelope &a, const ComplexEnvelope &b,
                          double ta, double tb)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a.grid.time(i);
        if (t < ta || t > tb) {
            continue;
        }
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? num / den : 0.0;
}

} // namespace qmem

#endif
