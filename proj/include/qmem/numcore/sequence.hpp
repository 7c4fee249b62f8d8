#ifndef QMEM_NUMCORE_SEQUENCE_HPP
#define QMEM_NUMCORE_SEQUENCE_HPP

#include <algorithm>

#include <qmem/numcore/pulse.hpp>

namespace qmem {

enum class EventKind { signal, strong_pulse, detuning_flip, medium_flip };

struct ProtocolEvent {
    EventKind kind;
    double time;
    PulseShape shape{};
};

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;

    bool contains(double t) const { return t >= begin && t <= end; }
    bool overlaps(const TimeWindow &o) const
    {
        return begin < o.end && o.begin < end;
    }
};

/**
 * Timed events of a protocol. Strong pulses are co-propagated with the
 * signal; detuning flips negate class detunings; a medium flip reverses the
 * slice order for the remaining time. silent lists windows in which the
 * radiated source is suppressed.
 */
struct ProtocolSequence {
    std::vector<ProtocolEvent> events;
    std::vector<TimeWindow> silent;
    TimeWindow window{};

    void validate() const
    {
        for (std::size_t i = 1; i < events.size(); ++i) {
            const auto &p = events[i - 1];
            const auto &q = events[i];
            bool pair = p.time == q.time &&
                ((p.kind == EventKind::detuning_flip &&
                  q.kind == EventKind::medium_flip) ||
                 (p.kind == EventKind::medium_flip &&
                  q.kind == EventKind::detuning_flip));
            if (!(q.time > p.time || pair)) {
                throw Error(ErrorKind::OrderingViolation,
                            "protocol events not strictly increasing");
            }
        }
        for (const auto &e : events) {
            if (e.kind == EventKind::signal && window.end > window.begin) {
                TimeWindow sw{e.shape.t_begin(1e-4), e.shape.t_end(1e-4)};
                if (sw.overlaps(window)) {
                    throw Error(ErrorKind::OrderingViolation,
                                "echo window overlaps the signal");
                }
            }
        }
    }

    std::vector<double> times_of(EventKind k) const
    {
        std::vector<double> out;
        for (const auto &e : events) {
            if (e.kind == k) {
                out.push_back(e.time);
            }
        }
        return out;
    }

    ProtocolSequence without_signal() const
    {
        ProtocolSequence s = *this;
        s.events.erase(std::remove_if(s.events.begin(), s.events.end(),
                                      [](const ProtocolEvent &e) {
                                          return e.kind == EventKind::signal;
                                      }),
                       s.events.end());
        return s;
    }
};

} // namespace qmem

#endif
