#ifndef QMEM_SLOWLIGHT_PROTOCOLS_HPP
#define QMEM_SLOWLIGHT_PROTOCOLS_HPP

#include <string>

#include <qmem/threelevel/solver.hpp>
#include <qmem/threelevel/susceptibility.hpp>

namespace qmem {

enum class SlowLightProtocol { shome, fid, eit, raman };

inline std::string to_string(SlowLightProtocol p)
{
    switch (p) {
    case SlowLightProtocol::shome:
        return "shome";
    case SlowLightProtocol::fid:
        return "fid";
    case SlowLightProtocol::eit:
        return "eit";
    case SlowLightProtocol::raman:
        return "raman";
    }
    return "?";
}

inline SlowLightProtocol slowlight_protocol_from(const std::string &s)
{
    if (s == "shome") {
        return SlowLightProtocol::shome;
    }
    if (s == "fid") {
        return SlowLightProtocol::fid;
    }
    if (s == "eit") {
        return SlowLightProtocol::eit;
    }
    if (s == "raman") {
        return SlowLightProtocol::raman;
    }
    throw Error(ErrorKind::Validation, "unknown slow-light protocol '" + s + "'");
}

/**
 * Stopped-light scenario. shome uses a Lorentzian spectral hole of width
 * gamma0 in a flat inhomogeneous line; fid, eit and raman use a
 * homogeneous line of width gamma. shome and fid store and retrieve with
 * Raman pi-pulses of width pi_width on the |s>-|e> transition; eit and
 * raman switch a constant control omega_c off at storage and back on at
 * retrieval.
 */
struct SlowLightScenario {
    SlowLightProtocol protocol = SlowLightProtocol::shome;
    double d = 20.0;
    double gamma0 = 1.0;
    double gamma = 1.0;
    PulseShape signal = gaussian_pulse(0.0, 10.0, pi / 20.0);
    double storage = 5.0;
    double retrieval = 60.0;
    double pi_width = 1.0;
    double omega_c = 0.0;
    double big_delta = 0.0;
    double small_delta = 0.0;

    /* numerics */
    std::size_t nz = 100;
    double samples_per_width = 10.0;
    /* shome hole classes span +-hole_span gamma0 */
    double hole_span = 10.0;
    double class_margin = 4.0;
    double window_widths = 8.0;
    /* grid padding after the efficiency window */
    double extra_time = 0.0;
    double grid_scale = 1.0;
    bool convergence_gate = false;
    double gate_tolerance = 0.01;
    int threads = 0;

    bool uses_pi_pulses() const
    {
        return protocol == SlowLightProtocol::shome ||
               protocol == SlowLightProtocol::fid;
    }

    Warnings validate() const
    {
        signal.validate();
        require(d >= 0.0, "SlowLightScenario: d must be >= 0");
        require(retrieval > storage && storage > signal.center,
                "SlowLightScenario: need retrieval > storage > signal center");
        require(samples_per_width > 0.0 && grid_scale > 0.0 &&
                    class_margin > 0.0 && hole_span > 0.0 &&
                    extra_time >= 0.0,
                "SlowLightScenario: grid factors must be positive");
        Warnings w;
        switch (protocol) {
        case SlowLightProtocol::shome:
            require(gamma0 > 0.0, "shome: gamma0 must be positive");
            require(pi_width > 0.0, "shome: pi_width must be positive");
            break;
        case SlowLightProtocol::fid:
            require(gamma > 0.0, "fid: gamma must be positive");
            require(pi_width > 0.0, "fid: pi_width must be positive");
            break;
        case SlowLightProtocol::eit:
            require(gamma > 0.0 && omega_c > 0.0,
                    "eit: gamma and omega_c must be positive");
            break;
        case SlowLightProtocol::raman:
            require(gamma > 0.0 && omega_c > 0.0,
                    "raman: gamma and omega_c must be positive");
            if (std::abs(big_delta) < 10.0 * gamma) {
                w.push_back({ErrorKind::RamanConditionViolated,
                             "one-photon detuning below 10 Gamma"});
            }
            break;
        }
        if (uses_pi_pulses() && 2.0 * pi_width > signal.width) {
            w.push_back({ErrorKind::RegimeWarning,
                         "Raman pi-pulse not much shorter than the signal"});
        }
        return w;
    }

    TimeWindow efficiency_window() const
    {
        return {retrieval, retrieval + window_widths * signal.width};
    }
};

struct SlowLightReport {
    std::string protocol;
    double numeric = 0.0;
    TimeWindow window{};
    /* energy leaving the medium between storage and retrieval */
    double replica_energy = 0.0;
    /* energy of the no-storage reference output */
    double reference_energy = 0.0;
    ConvergenceInfo convergence;
    Warnings warnings;
    ComplexEnvelope input;
    ComplexEnvelope output;
    ComplexEnvelope reference;
    ComplexEnvelope control;
};

namespace detail {

inline TimeGrid slowlight_grid(const SlowLightScenario &s)
{
    double wmin = s.signal.width;
    double t_begin = s.signal.t_begin(1e-9);
    if (s.uses_pi_pulses()) {
        wmin = std::min(wmin, s.pi_width);
    }
    if (s.protocol == SlowLightProtocol::eit ||
        s.protocol == SlowLightProtocol::raman) {
        // resolve decay, control Rabi frequency and one-photon detuning
        double rate = s.gamma + std::abs(s.omega_c) + std::abs(s.big_delta);
        wmin = std::min(wmin, 1.0 / rate);
    }
    double dt = wmin / (s.samples_per_width * s.grid_scale);
    double t_end = s.efficiency_window().end + s.signal.width + s.extra_time;
    // storage and retrieval fall on samples so control switches are exact
    const double gap = s.retrieval - s.storage;
    dt = gap / std::ceil(gap / dt);
    const double before = std::ceil((s.storage - t_begin) / dt);
    TimeGrid g{s.storage - before * dt, dt, 8};
    while (g.t_end() < t_end) {
        g.n *= 2;
    }
    return g;
}

inline DetuningDistribution slowlight_distribution(const SlowLightScenario &s,
                                                   const TimeGrid &g)
{
    if (s.protocol == SlowLightProtocol::shome) {
        double duration = g.t_end() - g.t0;
        return DetuningDistribution::sized(DistributionKind::lorentzian_hole,
                                           s.gamma0, s.hole_span * s.gamma0,
                                           duration,
                                           s.class_margin * s.grid_scale);
    }
    return DetuningDistribution::homogeneous_at(0.0);
}

inline ControlSchedule slowlight_control(const SlowLightScenario &s,
                                         const TimeGrid &g, bool storing)
{
    ControlSchedule c;
    const double far = g.t_end() + g.dt;
    const double start = g.t0 - g.dt;
    switch (s.protocol) {
    case SlowLightProtocol::shome:
    case SlowLightProtocol::fid:
        if (storing) {
            c.pulses.push_back(gaussian_pulse(s.storage, s.pi_width, pi));
            c.pulses.push_back(gaussian_pulse(s.retrieval, s.pi_width, pi));
        }
        break;
    case SlowLightProtocol::eit:
    case SlowLightProtocol::raman:
        if (storing) {
            c.segments.push_back({start, s.storage, s.omega_c});
            c.segments.push_back({s.retrieval, far, s.omega_c});
        } else {
            c.segments.push_back({start, far, s.omega_c});
        }
        break;
    }
    if (s.protocol == SlowLightProtocol::raman) {
        c.delta_one = s.big_delta;
        c.delta_two = s.small_delta;
    }
    return c;
}

inline PropagationConfig slowlight_prop(const SlowLightScenario &s,
                                        const TimeWindow &gate)
{
    PropagationConfig p;
    p.d = s.d;
    p.nz = s.nz;
    p.gamma = s.protocol == SlowLightProtocol::shome ? 0.0 : s.gamma;
    p.convergence_gate = s.convergence_gate;
    p.gate_tolerance = s.gate_tolerance;
    p.gate_window = gate;
    p.max_substeps = 256;
    p.threads = s.threads;
    return p;
}

} // namespace detail

/**
 * Frequency-domain counterpart of the no-storage reference: spectral hole
 * for shome, Lorentzian line for fid, exact EIT or Raman response.
 */
inline TransferFunction reference_transfer(const SlowLightScenario &s)
{
    switch (s.protocol) {
    case SlowLightProtocol::shome:
        return inverted_lorentzian(s.d, s.gamma0);
    case SlowLightProtocol::fid:
        return lorentzian(s.d, s.gamma);
    case SlowLightProtocol::eit:
        return eit_transfer(s.d, s.gamma, s.omega_c);
    case SlowLightProtocol::raman:
        return raman_transfer(s.d, s.gamma, s.omega_c, s.big_delta,
                              s.small_delta);
    }
    return lorentzian(s.d, s.gamma);
}

/** Output of the scenario with storage and retrieval events removed. */
inline ComplexEnvelope reference_slowlight(const SlowLightScenario &s)
{
    s.validate();
    auto g = detail::slowlight_grid(s);
    auto in = render_pulse(s.signal, g);
    auto dist = detail::slowlight_distribution(s, g);
    auto ctrl = detail::slowlight_control(s, g, false);
    auto prop = detail::slowlight_prop(s, {});
    prop.convergence_gate = false;
    return propagate_lambda(in, prop, dist, ctrl).output;
}

inline SlowLightReport run_slowlight(const SlowLightScenario &s)
{
    SlowLightReport r;
    r.warnings = s.validate();
    r.protocol = to_string(s.protocol);
    r.window = s.efficiency_window();
    auto g = detail::slowlight_grid(s);
    auto in = render_pulse(s.signal, g);
    auto dist = detail::slowlight_distribution(s, g);
    auto ctrl = detail::slowlight_control(s, g, true);
    auto prop = detail::slowlight_prop(s, r.window);

    auto res = propagate_lambda(in, prop, dist, ctrl);
    prop.convergence_gate = false;
    auto ref = propagate_lambda(in, prop, dist,
                                detail::slowlight_control(s, g, false));

    const double ein = in.energy();
    r.numeric = res.output.energy(r.window.begin, r.window.end) / ein;
    r.replica_energy = res.output.energy(s.storage, s.retrieval) / ein;
    r.reference_energy = ref.output.energy() / ein;
    r.convergence = res.convergence;
    r.warnings.insert(r.warnings.end(), res.warnings.begin(),
                      res.warnings.end());
    r.input = in;
    r.output = std::move(res.output);
    r.reference = std::move(ref.output);
    r.control = ctrl.render(g);
    return r;
}

/* scenario presets with the parameter sets of the reference simulations */
inline SlowLightScenario shome_scenario()
{
    SlowLightScenario s;
    s.protocol = SlowLightProtocol::shome;
    s.d = 20.0;
    s.gamma0 = 1.0;
    s.signal = gaussian_pulse(0.0, 10.0, pi / 20.0);
    s.storage = 5.0;
    s.retrieval = 60.0;
    s.pi_width = 1.0;
    return s;
}

inline SlowLightScenario fid_scenario()
{
    SlowLightScenario s;
    s.protocol = SlowLightProtocol::fid;
    s.d = 20.0;
    s.gamma = 1.0;
    s.signal = gaussian_pulse(0.0, 0.05, pi / 20.0);
    s.storage = 0.05;
    s.retrieval = 0.8;
    s.pi_width = 0.005;
    return s;
}

inline SlowLightScenario eit_scenario()
{
    SlowLightScenario s;
    s.protocol = SlowLightProtocol::eit;
    s.d = 20.0;
    s.gamma = 4.0;
    s.omega_c = 4.0;
    s.signal = gaussian_pulse(0.0, 10.0, pi / 20.0);
    s.storage = 5.0;
    s.retrieval = 60.0;
    return s;
}

inline SlowLightScenario raman_scenario()
{
    SlowLightScenario s;
    s.protocol = SlowLightProtocol::raman;
    s.d = 20.0;
    s.gamma = 10.0;
    s.big_delta = 1000.0;
    s.omega_c = 200.0 * std::sqrt(10.0);
    s.small_delta = 100.0;
    s.signal = gaussian_pulse(0.0, 0.05, pi / 20.0);
    s.storage = 0.05;
    s.retrieval = 0.8;
    return s;
}

} // namespace qmem

#endif
