#ifndef QMEM_ECHO_PROTOCOLS_HPP
#define QMEM_ECHO_PROTOCOLS_HPP

#include <qmem/echo/analytic.hpp>
#include <qmem/twolevel/solver.hpp>

namespace qmem {

enum class EfficiencyMetric { automatic, energy, peak };

/**
 * Settings shared by the echo sequencers. Grids are derived from the
 * pulses: dt <= min width / samples_per_width, detuning half-span
 * max(span_factor / sigma_signal, strong_span_factor * strong bandwidth),
 * class spacing from class_margin x grid duration.
 */
struct EchoConfig {
    PropagationConfig prop{};
    double span_factor = 20.0;
    double strong_span_factor = 6.0;
    double class_margin = 4.0;
    double samples_per_width = 10.0;
    /* echo window half-width in signal widths */
    double window_widths = 4.0;
    /* grid padding after the echo window, in signal widths */
    double tail_widths = 4.0;
    /* silent window half-width in signal widths (ROSE) */
    double silent_widths = 3.0;
    double grid_scale = 1.0;
    EfficiencyMetric metric = EfficiencyMetric::automatic;

    void validate() const
    {
        prop.validate();
        require(span_factor > 0.0 && class_margin > 0.0 &&
                    samples_per_width > 0.0 && grid_scale > 0.0,
                "EchoConfig: grid factors must be positive");
        require(window_widths > 0.0, "EchoConfig: window must be positive");
    }
};

struct EfficiencyReport {
    std::string protocol;
    double numeric = 0.0;
    double analytic = 0.0;
    double echo_time = 0.0;
    double pulse_ratio = 0.0;
    double energy_ratio = 0.0;
    double peak_ratio = 0.0;
    std::string metric;
    TimeWindow window{};
    double predicted_echo_time = 0.0;
    /* end-of-run excitation over classes inside the signal bandwidth */
    double mean_excited = 0.0;
    double min_excited = 0.0;
    ConvergenceInfo convergence;
    Warnings warnings;
    ComplexEnvelope input;
    ComplexEnvelope output;
    /* strong pulses alone; empty for CRIB */
    ComplexEnvelope reference;
    ComplexEnvelope echo;
};

namespace detail {

struct EchoSetup {
    TimeGrid grid;
    DetuningDistribution dist;
};

inline EchoSetup echo_setup(const EchoConfig &cfg, const PulseShape &signal,
                            const std::vector<PulseShape> &strong,
                            double t_end)
{
    double wmin = signal.width;
    double span = cfg.span_factor / signal.width;
    double t_begin = signal.t_begin(1e-9);
    for (const auto &p : strong) {
        wmin = std::min(wmin, p.width);
        span = std::max(span, cfg.strong_span_factor * p.bandwidth());
        t_begin = std::min(t_begin, p.t_begin(1e-9));
    }
    double dt = wmin / (cfg.samples_per_width * cfg.grid_scale);
    EchoSetup s;
    s.grid = TimeGrid::covering(t_begin, t_end, dt);
    double duration = s.grid.t_end() - s.grid.t0;
    s.dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, span,
                                         duration,
                                         cfg.class_margin * cfg.grid_scale);
    return s;
}

inline void fill_metrics(EfficiencyReport &r, const ComplexEnvelope &in,
                         const ComplexEnvelope &echo, EfficiencyMetric def,
                         EfficiencyMetric chosen)
{
    const auto &w = r.window;
    r.energy_ratio = echo.energy(w.begin, w.end) / in.energy();
    r.peak_ratio = echo.peak_intensity(w.begin, w.end) / in.peak_intensity();
    r.echo_time = echo.peak_time(w.begin, w.end);
    auto m = chosen == EfficiencyMetric::automatic ? def : chosen;
    r.metric = m == EfficiencyMetric::peak ? "peak_intensity_ratio"
                                           : "energy_ratio";
    r.numeric = m == EfficiencyMetric::peak ? r.peak_ratio : r.energy_ratio;
}

/* runs f(nz) and, when the gate is on, f(2 nz); compares numeric */
template <class F>
EfficiencyReport gated_run(const EchoConfig &cfg, F f)
{
    auto rep = f(cfg.prop.nz);
    rep.convergence.nz = cfg.prop.nz;
    if (cfg.prop.convergence_gate) {
        auto fine = f(2 * cfg.prop.nz);
        rep.convergence.gate_checked = true;
        rep.convergence.metric = rep.numeric;
        rep.convergence.metric_refined = fine.numeric;
        double ref = std::max(std::abs(fine.numeric), 1e-300);
        rep.convergence.rel_change = std::abs(rep.numeric - fine.numeric) / ref;
        if (rep.convergence.rel_change > cfg.prop.gate_tolerance) {
            throw Error(ErrorKind::ConvergenceNotMet,
                        "doubling nz changed the efficiency by " +
                            std::to_string(rep.convergence.rel_change));
        }
    }
    return rep;
}

inline PropagationConfig inner_prop(const EchoConfig &cfg, std::size_t nz)
{
    PropagationConfig p = cfg.prop;
    p.nz = nz;
    p.convergence_gate = false;
    p.inversion = Inversion::ground;
    return p;
}

} // namespace detail

/**
 * Two-pulse photon echo: weak signal, pi-pulse at signal.center + tau,
 * echo expected at signal.center + 2 tau. The echo field is the
 * difference between runs with and without the signal.
 */
namespace detail {

inline void check_perturbative(const PulseShape &signal)
{
    if (std::abs(signal.area) > pi / 10.0 + 1e-15) {
        throw Error(ErrorKind::PerturbativeViolation,
                    "signal area above pi/10");
    }
}

} // namespace detail

inline void validate_2pe(const EchoConfig &cfg, const PulseShape &signal,
                         const PulseShape &pi_pulse, double tau)
{
    cfg.validate();
    signal.validate();
    pi_pulse.validate();
    require(std::abs(pi_pulse.area - pi) < 1e-9 * pi,
            "run_2pe: rephasing pulse area must be pi");
    detail::check_perturbative(signal);
    require(tau > 0.0, "run_2pe: tau must be positive");
}

inline EfficiencyReport run_2pe(const EchoConfig &cfg, const PulseShape &signal,
                                PulseShape pi_pulse, double tau)
{
    validate_2pe(cfg, signal, pi_pulse, tau);
    pi_pulse.center = signal.center + tau;
    const double te = signal.center + 2.0 * tau;
    const double sw = signal.width;
    auto setup = detail::echo_setup(
        cfg, signal, {pi_pulse},
        te + (cfg.window_widths + cfg.tail_widths) * sw);

    ProtocolSequence seq;
    seq.events.push_back({EventKind::signal, signal.center, signal});
    seq.events.push_back({EventKind::strong_pulse, pi_pulse.center, pi_pulse});
    seq.window = {te - cfg.window_widths * sw, te + cfg.window_widths * sw};

    auto in = render_pulse(signal, setup.grid);
    ComplexEnvelope none(setup.grid);

    return detail::gated_run(cfg, [&](std::size_t nz) {
        auto p = detail::inner_prop(cfg, nz);
        auto full = propagate(in, p, setup.dist, seq);
        auto ref = propagate(none, p, setup.dist, seq);
        EfficiencyReport r;
        r.protocol = "2pe";
        r.analytic = analytic_efficiency(EchoProtocol::tpe, cfg.prop.d);
        r.pulse_ratio = signal.width / pi_pulse.width;
        r.window = seq.window;
        r.predicted_echo_time = te;
        r.echo = full.output - ref.output;
        r.reference = ref.output;
        detail::fill_metrics(r, in, r.echo, EfficiencyMetric::peak, cfg.metric);
        auto [mean, mn] = ref.excitation_in_band(1.0 / signal.width);
        r.mean_excited = mean;
        r.min_excited = mn;
        r.convergence = full.convergence;
        r.input = in;
        r.output = full.output;
        return r;
    });
}

enum class Direction { forward, backward };

/**
 * Controlled reversible inhomogeneous broadening: class detunings are
 * negated at tau; backward retrieval also reverses the slice order.
 * The echo is expected at 2 tau - signal.center.
 */
inline void validate_crib(const EchoConfig &cfg, const PulseShape &signal,
                          double tau)
{
    cfg.validate();
    signal.validate();
    detail::check_perturbative(signal);
    double peak = std::abs(signal.peak_amplitude());
    if (tau <= signal.center || std::abs(signal.value(tau)) >= 1e-4 * peak) {
        throw Error(ErrorKind::FlipDuringSignal,
                    "detuning flip before the signal tail fell below 1e-4");
    }
}

inline EfficiencyReport run_crib(const EchoConfig &cfg, const PulseShape &signal,
                                 double tau, Direction dir)
{
    validate_crib(cfg, signal, tau);
    const double te = 2.0 * tau - signal.center;
    const double sw = signal.width;
    auto setup = detail::echo_setup(
        cfg, signal, {}, te + (cfg.window_widths + cfg.tail_widths) * sw);

    ProtocolSequence seq;
    seq.events.push_back({EventKind::signal, signal.center, signal});
    seq.events.push_back({EventKind::detuning_flip, tau, {}});
    if (dir == Direction::backward) {
        seq.events.push_back({EventKind::medium_flip, tau, {}});
    }
    seq.window = {te - cfg.window_widths * sw, te + cfg.window_widths * sw};
    auto in = render_pulse(signal, setup.grid);

    return detail::gated_run(cfg, [&](std::size_t nz) {
        auto p = detail::inner_prop(cfg, nz);
        auto full = propagate(in, p, setup.dist, seq);
        EfficiencyReport r;
        r.protocol = dir == Direction::forward ? "crib_fwd" : "crib_bwd";
        r.analytic = analytic_efficiency(dir == Direction::forward
                                             ? EchoProtocol::crib_fwd
                                             : EchoProtocol::crib_bwd,
                                         cfg.prop.d);
        r.window = seq.window;
        r.predicted_echo_time = te;
        r.echo = full.output;
        detail::fill_metrics(r, in, r.echo, EfficiencyMetric::energy,
                             cfg.metric);
        auto [mean, mn] = full.excitation_in_band(1.0 / signal.width);
        r.mean_excited = mean;
        r.min_excited = mn;
        r.convergence = full.convergence;
        r.input = in;
        r.output = full.output;
        return r;
    });
}

/* rephasing pulses of a ROSE sequence; shapes are re-centered on t2, t3 */
struct RosePulses {
    double t2;
    double t3;
    PulseShape first;
    PulseShape second;
};

/**
 * Adiabatic CHS pulse for a signal of width sigma: beta = 2/sigma,
 * sweep mu = 3, Omega0 = 1.2 sqrt(5 mu) beta.
 */
inline PulseShape chs_pulse(double center, double sigma, double mu = 3.0,
                            double margin = 1.2)
{
    double beta = 2.0 / sigma;
    double omega0 = margin * std::sqrt(5.0 * mu) * beta;
    return sech_pulse(center, 1.0 / beta, omega0 * pi / beta, mu);
}

/**
 * Revival of silenced echo. The first echo near 2 t2 - t1 is silenced by
 * suppressing the radiated source in a window of silent_widths signal
 * widths; the final echo is expected at t1 + 2 (t3 - t2).
 */
inline void validate_rose(const EchoConfig &cfg, const PulseShape &signal,
                          const RosePulses &pulses)
{
    cfg.validate();
    signal.validate();
    detail::check_perturbative(signal);
    const double t1 = signal.center;
    if (pulses.t3 <= pulses.t2 || pulses.t2 <= t1) {
        throw Error(ErrorKind::OrderingViolation,
                    "rephasing pulses must satisfy t1 < t2 < t3");
    }
    pulses.first.validate();
    pulses.second.validate();
    if (t1 + 2.0 * (pulses.t3 - pulses.t2) <= pulses.t3) {
        throw Error(ErrorKind::OrderingViolation,
                    "ROSE echo precedes the second rephasing pulse");
    }
}

inline EfficiencyReport run_rose(const EchoConfig &cfg, const PulseShape &signal,
                                 RosePulses pulses,
                                 Direction dir = Direction::forward)
{
    validate_rose(cfg, signal, pulses);
    const double t1 = signal.center;
    pulses.first.center = pulses.t2;
    pulses.second.center = pulses.t3;
    const double te = t1 + 2.0 * (pulses.t3 - pulses.t2);
    const double sw = signal.width;
    const double w = cfg.window_widths * sw;
    auto setup = detail::echo_setup(cfg, signal, {pulses.first, pulses.second},
                                    te + (cfg.window_widths + cfg.tail_widths) * sw);

    ProtocolSequence seq;
    seq.events.push_back({EventKind::signal, t1, signal});
    seq.events.push_back({EventKind::strong_pulse, pulses.t2, pulses.first});
    seq.events.push_back({EventKind::strong_pulse, pulses.t3, pulses.second});
    if (dir == Direction::backward) {
        double tf = 0.5 * (pulses.second.t_end(1e-6) + te - w);
        seq.events.push_back({EventKind::medium_flip, tf, {}});
    }
    const double first_echo = 2.0 * pulses.t2 - t1;
    const double sil = cfg.silent_widths * sw;
    seq.silent.push_back({first_echo - sil, first_echo + sil});
    seq.window = {te - w, te + w};

    auto in = render_pulse(signal, setup.grid);
    ComplexEnvelope none(setup.grid);

    return detail::gated_run(cfg, [&](std::size_t nz) {
        auto p = detail::inner_prop(cfg, nz);
        auto full = propagate(in, p, setup.dist, seq);
        auto ref = propagate(none, p, setup.dist, seq);
        EfficiencyReport r;
        r.protocol = dir == Direction::forward ? "rose_fwd" : "rose_bwd";
        r.analytic = analytic_efficiency(dir == Direction::forward
                                             ? EchoProtocol::rose_fwd
                                             : EchoProtocol::crib_bwd,
                                         cfg.prop.d);
        r.pulse_ratio = signal.width / pulses.first.width;
        r.window = seq.window;
        r.predicted_echo_time = te;
        r.echo = full.output - ref.output;
        r.reference = ref.output;
        detail::fill_metrics(r, in, r.echo, EfficiencyMetric::energy,
                             cfg.metric);
        auto [mean, mn] = ref.excitation_in_band(1.0 / signal.width);
        r.mean_excited = mean;
        r.min_excited = mn;
        r.convergence = full.convergence;
        r.input = in;
        r.output = full.output;
        return r;
    });
}

} // namespace qmem

#endif
