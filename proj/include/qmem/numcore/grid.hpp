#ifndef QMEM_NUMCORE_GRID_HPP
#define QMEM_NUMCORE_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <qmem/numcore/error.hpp>

namespace qmem {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/**
 * Uniform time grid t_i = t0 + i dt, i < n. The paired angular-frequency
 * grid has spacing 2 pi / (n dt) in FFT order.
 */
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t n = 8;

    void validate() const
    {
        require(dt > 0.0, "TimeGrid: dt must be positive");
        require(n >= 8, "TimeGrid: n must be at least 8");
        require((n & (n - 1)) == 0, "TimeGrid: n must be a power of two");
    }

    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double t_end() const { return time(n - 1); }
    double domega() const { return 2.0 * pi / (static_cast<double>(n) * dt); }

    double omega(std::size_t k) const
    {
        auto kk = static_cast<double>(k);
        if (k >= n / 2) {
            kk -= static_cast<double>(n);
        }
        return kk * domega();
    }

    /* nearest sample index, clamped */
    std::size_t index_of(double t) const
    {
        double x = std::round((t - t0) / dt);
        if (x < 0.0) {
            return 0;
        }
        if (x > static_cast<double>(n - 1)) {
            return n - 1;
        }
        return static_cast<std::size_t>(x);
    }

    /* smallest power-of-two grid starting at t_begin that reaches t_end
     * with dt <= max_dt */
    static TimeGrid covering(double t_begin, double t_end, double max_dt,
                             std::size_t min_n = 8)
    {
        require(t_end > t_begin, "TimeGrid::covering: empty interval");
        require(max_dt > 0.0, "TimeGrid::covering: max_dt must be positive");
        std::size_t n = 8;
        while (n < min_n) {
            n *= 2;
        }
        while ((t_end - t_begin) / static_cast<double>(n - 1) > max_dt) {
            n *= 2;
        }
        TimeGrid g{t_begin, (t_end - t_begin) / static_cast<double>(n - 1), n};
        return g;
    }

    bool operator==(const TimeGrid &o) const
    {
        return t0 == o.t0 && dt == o.dt && n == o.n;
    }
};

/** Sampled complex field envelope on a TimeGrid (Rabi-frequency units). */
struct ComplexEnvelope {
    TimeGrid grid;
    std::vector<cplx> samples;

    ComplexEnvelope() = default;
    explicit ComplexEnvelope(const TimeGrid &g)
        : grid(g), samples(g.n, cplx(0.0, 0.0))
    {}
    ComplexEnvelope(const TimeGrid &g, std::vector<cplx> s)
        : grid(g), samples(std::move(s))
    {
        require(samples.size() == grid.n,
                "ComplexEnvelope: sample count differs from grid");
    }

    std::size_t size() const { return samples.size(); }
    cplx operator[](std::size_t i) const { return samples[i]; }
    cplx &operator[](std::size_t i) { return samples[i]; }

    /* sum |E|^2 dt over [ta, tb] */
    double energy(double ta, double tb) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double t = grid.time(i);
            if (t >= ta && t <= tb) {
                acc += std::norm(samples[i]);
            }
        }
        return acc * grid.dt;
    }

    double energy() const
    {
        double acc = 0.0;
        for (const auto &s : samples) {
            acc += std::norm(s);
        }
        return acc * grid.dt;
    }

    double peak_intensity(double ta, double tb) const
    {
        double m = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double t = grid.time(i);
            if (t >= ta && t <= tb) {
                m = std::max(m, std::norm(samples[i]));
            }
        }
        return m;
    }

    double peak_intensity() const
    {
        return peak_intensity(grid.t0, grid.t_end());
    }

    double peak_time(double ta, double tb) const
    {
        double m = -1.0;
        double tp = ta;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double t = grid.time(i);
            if (t >= ta && t <= tb && std::norm(samples[i]) > m) {
                m = std::norm(samples[i]);
                tp = t;
            }
        }
        return tp;
    }

    double peak_time() const { return peak_time(grid.t0, grid.t_end()); }

    /* intensity-weighted mean time */
    double first_moment() const
    {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double w = std::norm(samples[i]);
            num += w * grid.time(i);
            den += w;
        }
        return den > 0.0 ? num / den : 0.0;
    }

    /* complex area sum E dt */
    cplx area() const
    {
        cplx acc(0.0, 0.0);
        for (const auto &s : samples) {
            acc += s;
        }
        return acc * grid.dt;
    }

    ComplexEnvelope &operator+=(const ComplexEnvelope &o)
    {
        require(o.grid == grid, "ComplexEnvelope: grid mismatch");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] += o.samples[i];
        }
        return *this;
    }

    ComplexEnvelope &operator-=(const ComplexEnvelope &o)
    {
        require(o.grid == grid, "ComplexEnvelope: grid mismatch");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] -= o.samples[i];
        }
        return *this;
    }

    ComplexEnvelope &operator*=(cplx f)
    {
        for (auto &s : samples) {
            s *= f;
        }
        return *this;
    }
};

inline ComplexEnvelope operator+(ComplexEnvelope a, const ComplexEnvelope &b)
{
    a += b;
    return a;
}

inline ComplexEnvelope operator-(ComplexEnvelope a, const ComplexEnvelope &b)
{
    a -= b;
    return a;
}

} // namespace qmem

#endif
