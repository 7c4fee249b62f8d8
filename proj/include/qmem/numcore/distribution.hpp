#ifndef QMEM_NUMCORE_DISTRIBUTION_HPP
#define QMEM_NUMCORE_DISTRIBUTION_HPP

#include <cmath>

#include <qmem/numcore/grid.hpp>

namespace qmem {

enum class DistributionKind { flat, lorentzian_hole, delta_resonant };

struct DetuningClass {
    double delta;
    /* quadrature weight times g(delta); 1 for delta_resonant */
    double weight;
};

/**
 * Inhomogeneous detuning profile g(Delta) sampled on a uniform class grid
 * over [span_min, span_max] with trapezoid weights. delta_resonant is the
 * homogeneous single-class case located at delta0.
 */
struct DetuningDistribution {
    DistributionKind kind = DistributionKind::flat;
    double gamma0 = 1.0;
    double span_min = -20.0;
    double span_max = 20.0;
    std::size_t nclasses = 801;
    double delta0 = 0.0;

    void validate() const
    {
        if (kind == DistributionKind::delta_resonant) {
            return;
        }
        require(span_max > span_min, "DetuningDistribution: empty span");
        require(nclasses >= 3, "DetuningDistribution: need >= 3 classes");
        if (kind == DistributionKind::lorentzian_hole) {
            require(gamma0 > 0.0, "DetuningDistribution: gamma0 must be > 0");
        }
    }

    double g(double delta) const
    {
        switch (kind) {
        case DistributionKind::flat:
            return 1.0;
        case DistributionKind::lorentzian_hole: {
            double x = delta / gamma0;
            return 1.0 - 1.0 / (1.0 + x * x);
        }
        case DistributionKind::delta_resonant:
            return delta == delta0 ? 1.0 : 0.0;
        }
        return 0.0;
    }

    bool homogeneous() const { return kind == DistributionKind::delta_resonant; }

    double spacing() const
    {
        if (homogeneous()) {
            return 0.0;
        }
        return (span_max - span_min) / static_cast<double>(nclasses - 1);
    }

    std::vector<DetuningClass> classes() const
    {
        validate();
        if (homogeneous()) {
            return {{delta0, 1.0}};
        }
        std::vector<DetuningClass> out(nclasses);
        const double h = spacing();
        for (std::size_t c = 0; c < nclasses; ++c) {
            double delta = span_min + h * static_cast<double>(c);
            double w = (c == 0 || c + 1 == nclasses) ? 0.5 * h : h;
            out[c] = {delta, w * g(delta)};
        }
        return out;
    }

    /* trapezoid estimate of int g over the span */
    double integral() const
    {
        double acc = 0.0;
        for (const auto &c : classes()) {
            acc += c.weight;
        }
        return acc;
    }

    bool symmetric() const
    {
        return !homogeneous() &&
            std::abs(span_min + span_max) <= 1e-12 * (span_max - span_min);
    }

    /**
     * int g / Delta^2 over the wings outside the span (both sides). Used
     * for the far-wing group-delay correction; zero when not symmetric.
     */
    double tail_coefficient() const
    {
        if (!symmetric()) {
            return 0.0;
        }
        const double dmax = span_max;
        switch (kind) {
        case DistributionKind::flat:
            return 2.0 / dmax;
        case DistributionKind::lorentzian_hole:
            /* g / Delta^2 = 1 / (gamma0^2 + Delta^2) */
            return 2.0 / gamma0 * (0.5 * pi - std::atan(dmax / gamma0));
        case DistributionKind::delta_resonant:
            return 0.0;
        }
        return 0.0;
    }

    /**
     * Class grid for a flat-type profile: span +-max(span_factor * bandwidth,
     * extra), spacing small enough that 2 pi / dDelta >= margin * duration.
     */
    static DetuningDistribution sized(DistributionKind kind, double gamma0,
                                      double half_span, double duration,
                                      double margin)
    {
        require(half_span > 0.0 && duration > 0.0 && margin > 0.0,
                "DetuningDistribution::sized: invalid arguments");
        DetuningDistribution d;
        d.kind = kind;
        d.gamma0 = gamma0;
        d.span_min = -half_span;
        d.span_max = half_span;
        double dmax = 2.0 * pi / (margin * duration);
        auto intervals = static_cast<std::size_t>(std::ceil(2.0 * half_span / dmax));
        if (intervals % 2 == 1) {
            ++intervals;
        }
        d.nclasses = intervals + 1;
        return d;
    }

    static DetuningDistribution homogeneous_at(double delta0)
    {
        DetuningDistribution d;
        d.kind = DistributionKind::delta_resonant;
        d.delta0 = delta0;
        d.nclasses = 1;
        return d;
    }
};

} // namespace qmem

#endif
