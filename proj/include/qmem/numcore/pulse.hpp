#ifndef QMEM_NUMCORE_PULSE_HPP
#define QMEM_NUMCORE_PULSE_HPP

#include <algorithm>
#include <cmath>

#include <qmem/numcore/grid.hpp>

namespace qmem {

enum class PulseKind { gaussian, sech_chirped, square, rising_exponential };

/**
 * Analytic pulse description.
 *
 * gaussian:   area/(width sqrt(2 pi)) exp(-(t-c)^2 / (2 width^2))
 * square:     area/width on [c - width/2, c + width/2]
 * sech:       Omega0 sech(beta (t-c)) exp(i chirp ln cosh(beta (t-c))),
 *             beta = 1/width, Omega0 = area beta / pi, so the instantaneous
 *             frequency is chirp*beta*tanh(beta (t-c))
 * rising_exponential: A exp((t-c)/width) for t <= c, area = A width
 */
struct PulseShape {
    PulseKind kind = PulseKind::gaussian;
    double center = 0.0;
    double width = 1.0;
    double area = pi;
    double chirp = 0.0;
    double phase = 0.0;

    void validate() const
    {
        require(width > 0.0, "PulseShape: width must be positive");
        require(std::isfinite(area) && std::isfinite(center),
                "PulseShape: non-finite parameters");
        require(kind == PulseKind::sech_chirped || chirp == 0.0,
                "PulseShape: chirp only allowed for sech pulses");
    }

    double peak_amplitude() const
    {
        switch (kind) {
        case PulseKind::gaussian:
            return area / (width * std::sqrt(2.0 * pi));
        case PulseKind::square:
            return area / width;
        case PulseKind::sech_chirped:
            return area / (pi * width);
        case PulseKind::rising_exponential:
            return area / width;
        }
        return 0.0;
    }

    /* point value of the envelope */
    cplx value(double t) const
    {
        double x = t - center;
        cplx ph = std::polar(1.0, phase);
        switch (kind) {
        case PulseKind::gaussian:
            return ph * peak_amplitude() *
                std::exp(-x * x / (2.0 * width * width));
        case PulseKind::square:
            return std::abs(x) <= 0.5 * width ? ph * peak_amplitude() : cplx{};
        case PulseKind::sech_chirped: {
            double b = x / width;
            double ab = std::abs(b);
            /* ln cosh without overflow */
            double lc = ab + std::log1p(std::exp(-2.0 * ab)) - std::log(2.0);
            return ph * peak_amplitude() / std::cosh(b) *
                std::polar(1.0, chirp * lc);
        }
        case PulseKind::rising_exponential:
            return x <= 0.0 ? ph * peak_amplitude() * std::exp(x / width)
                            : cplx{};
        }
        return {};
    }

    /* value averaged over [a, b]; exact for the piecewise kinds */
    cplx cell_average(double a, double b) const
    {
        cplx ph = std::polar(1.0, phase);
        double h = b - a;
        if (kind == PulseKind::square) {
            double lo = std::max(a, center - 0.5 * width);
            double hi = std::min(b, center + 0.5 * width);
            return hi > lo ? ph * peak_amplitude() * (hi - lo) / h : cplx{};
        }
        if (kind == PulseKind::rising_exponential) {
            double hi = std::min(b, center);
            if (hi <= a) {
                return {};
            }
            double v = width * (std::exp((hi - center) / width) -
                                std::exp((a - center) / width));
            return ph * peak_amplitude() * v / h;
        }
        return value(0.5 * (a + b));
    }

    /* time where the envelope drops below rel of its peak (both sides) */
    double support_halfwidth(double rel) const
    {
        switch (kind) {
        case PulseKind::gaussian:
            return width * std::sqrt(-2.0 * std::log(rel));
        case PulseKind::square:
            return 0.5 * width;
        case PulseKind::sech_chirped:
            return width * std::acosh(1.0 / rel);
        case PulseKind::rising_exponential:
            return -width * std::log(rel);
        }
        return width;
    }

    double t_begin(double rel = 1e-8) const
    {
        return center - support_halfwidth(rel);
    }

    double t_end(double rel = 1e-8) const
    {
        if (kind == PulseKind::rising_exponential) {
            return center;
        }
        return center + support_halfwidth(rel);
    }

    /* rough angular bandwidth used for grid sizing */
    double bandwidth() const
    {
        double b = 1.0 / width;
        if (kind == PulseKind::sech_chirped) {
            b += std::abs(chirp) / width;
        }
        if (kind == PulseKind::square) {
            b = 2.0 * pi / width;
        }
        return b;
    }
};

inline PulseShape gaussian_pulse(double center, double sigma, double area)
{
    PulseShape p;
    p.kind = PulseKind::gaussian;
    p.center = center;
    p.width = sigma;
    p.area = area;
    return p;
}

inline PulseShape square_pulse(double center, double width, double area)
{
    PulseShape p;
    p.kind = PulseKind::square;
    p.center = center;
    p.width = width;
    p.area = area;
    return p;
}

inline PulseShape sech_pulse(double center, double width, double area,
                             double chirp)
{
    PulseShape p;
    p.kind = PulseKind::sech_chirped;
    p.center = center;
    p.width = width;
    p.area = area;
    p.chirp = chirp;
    return p;
}

inline PulseShape rising_exponential_pulse(double cut, double tc, double area)
{
    PulseShape p;
    p.kind = PulseKind::rising_exponential;
    p.center = cut;
    p.width = tc;
    p.area = area;
    return p;
}

/**
 * Samples a pulse on the grid. Square and exponential kinds are cell
 * averaged so that sum(E) dt reproduces the area exactly.
 */
inline ComplexEnvelope render_pulse(const PulseShape &shape,
                                    const TimeGrid &grid)
{
    grid.validate();
    shape.validate();
    ComplexEnvelope env(grid);
    double peak = std::abs(shape.peak_amplitude());
    const double thr = 1e-8;
    if (peak > 0.0) {
        bool clipped = false;
        if (shape.kind == PulseKind::square) {
            clipped = shape.center - 0.5 * shape.width < grid.t0 - 0.5 * grid.dt ||
                shape.center + 0.5 * shape.width > grid.t_end() + 0.5 * grid.dt;
        } else {
            double ea = std::abs(shape.value(grid.t0)) / peak;
            double eb = std::abs(shape.value(grid.t_end())) / peak;
            clipped = ea > thr || eb > thr;
        }
        if (clipped) {
            throw Error(ErrorKind::GridTooShort,
                        "pulse tails exceed 1e-8 of peak at grid edge");
        }
    }
    for (std::size_t i = 0; i < grid.n; ++i) {
        double t = grid.time(i);
        env[i] = shape.cell_average(t - 0.5 * grid.dt, t + 0.5 * grid.dt);
    }
    return env;
}

} // namespace qmem

#endif
