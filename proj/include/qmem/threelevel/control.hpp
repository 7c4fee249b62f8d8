#ifndef QMEM_THREELEVEL_CONTROL_HPP
#define QMEM_THREELEVEL_CONTROL_HPP

#include <qmem/numcore/pulse.hpp>

namespace qmem {

/** Constant control amplitude on [begin, end). */
struct ControlSegment {
    double begin;
    double end;
    double level;
};

/**
 * Control field on the |s>-|e> transition: piecewise constant segments
 * plus rendered pulses (Raman pi-pulses), with the one- and two-photon
 * detunings of the Lambda system.
 */
struct ControlSchedule {
    std::vector<ControlSegment> segments;
    std::vector<PulseShape> pulses;
    double delta_two = 0.0;
    double delta_one = 0.0;

    void validate() const
    {
        for (std::size_t i = 0; i < segments.size(); ++i) {
            require(segments[i].end > segments[i].begin,
                    "ControlSchedule: empty segment");
            if (i > 0) {
                require(segments[i].begin >= segments[i - 1].end,
                        "ControlSchedule: segments must be ordered");
            }
        }
        for (const auto &p : pulses) {
            p.validate();
        }
    }

    bool empty() const { return segments.empty() && pulses.empty(); }

    /* side > 0 takes the right limit at a segment edge within tol, side
     * < 0 the left limit, side == 0 the half-open [begin, end) value */
    cplx omega(double t, int side = 0, double tol = 0.0) const
    {
        cplx v(0.0, 0.0);
        for (const auto &s : segments) {
            bool in = side > 0   ? (t >= s.begin - tol && t < s.end - tol)
                      : side < 0 ? (t > s.begin + tol && t <= s.end + tol)
                                 : (t >= s.begin && t < s.end);
            if (in) {
                v += s.level;
            }
        }
        for (const auto &p : pulses) {
            v += p.value(t);
        }
        return v;
    }

    /* control sampled on a grid for traces */
    ComplexEnvelope render(const TimeGrid &g) const
    {
        ComplexEnvelope e(g);
        for (std::size_t i = 0; i < g.n; ++i) {
            e[i] = omega(g.time(i));
        }
        return e;
    }

    static ControlSchedule constant(double level, double begin, double end)
    {
        ControlSchedule c;
        c.segments.push_back({begin, end, level});
        return c;
    }
};

} // namespace qmem

#endif
