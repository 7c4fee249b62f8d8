#ifndef QMEM_TWOLEVEL_CONFIG_HPP
#define QMEM_TWOLEVEL_CONFIG_HPP

#include <qmem/numcore/march.hpp>
#include <qmem/numcore/sequence.hpp>

namespace qmem {

enum class Inversion { ground, inverted };

/**
 * Ensemble propagation settings; the medium has unit length so that
 * alpha = d. nt_substeps is the starting RK4 substep count, doubled by the
 * step gate until the local error is below step_tolerance.
 */
struct PropagationConfig {
    double d = 1.0;
    std::size_t nz = 50;
    std::size_t nt_substeps = 1;
    double gamma = 0.0;
    Inversion inversion = Inversion::ground;

    ZScheme z_scheme = ZScheme::trapezoid;
    bool wing_correction = true;
    double step_tolerance = 1e-6;
    std::size_t max_substeps = 64;

    bool convergence_gate = false;
    double gate_tolerance = 0.01;
    /* metric window for the gate; whole grid when empty */
    TimeWindow gate_window{};

    bool keep_slices = false;
    bool energy_budget = false;
    int threads = 0;

    void validate() const
    {
        require(d >= 0.0 && std::isfinite(d), "PropagationConfig: d must be >= 0");
        require(nz >= 20, "PropagationConfig: nz must be >= 20");
        require(nt_substeps >= 1, "PropagationConfig: nt_substeps must be >= 1");
        require(gamma >= 0.0, "PropagationConfig: gamma must be >= 0");
        require(step_tolerance > 0.0, "PropagationConfig: step tolerance must be > 0");
        require(gate_tolerance > 0.0, "PropagationConfig: gate tolerance must be > 0");
    }
};

namespace detail {

inline std::vector<signed char> flip_signs(const TimeGrid &g,
                                           const std::vector<double> &flips)
{
    std::vector<signed char> s(g.n, 1);
    for (double tf : flips) {
        for (std::size_t i = 0; i < g.n; ++i) {
            if (g.time(i) >= tf - 0.5 * g.dt) {
                s[i] = static_cast<signed char>(-s[i]);
            }
        }
    }
    return s;
}

inline std::vector<unsigned char> silent_mask(const TimeGrid &g,
                                              const std::vector<TimeWindow> &w)
{
    std::vector<unsigned char> m;
    if (w.empty()) {
        return m;
    }
    m.assign(g.n, 0);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (const auto &x : w) {
            if (x.contains(g.time(i))) {
                m[i] = 1;
            }
        }
    }
    return m;
}

/* shared plan setup for the two- and three-level propagators */
inline MarchPlan make_plan(const ComplexEnvelope &field,
                           const PropagationConfig &cfg,
                           const DetuningDistribution &dist,
                           const ProtocolSequence &sched, double wing_sign)
{
    MarchPlan p;
    p.grid = field.grid;
    p.field0 = field.samples;
    p.classes = dist.classes();
    p.kappa.resize(p.classes.size());
    if (dist.homogeneous()) {
        require(cfg.gamma > 0.0,
                "homogeneous ensemble needs a positive decay rate");
        p.kappa[0] = cfg.d * cfg.gamma;
    } else {
        for (std::size_t c = 0; c < p.classes.size(); ++c) {
            p.kappa[c] = cfg.d / pi * p.classes[c].weight;
        }
    }
    p.nz = cfg.nz;
    p.scheme = cfg.z_scheme;
    p.substeps = cfg.nt_substeps;
    p.sign = flip_signs(p.grid, sched.times_of(EventKind::detuning_flip));
    for (double t : sched.times_of(EventKind::medium_flip)) {
        p.medium_flips.push_back(p.grid.index_of(t));
    }
    p.silent = silent_mask(p.grid, sched.silent);
    if (cfg.wing_correction && !dist.homogeneous()) {
        p.wing = wing_sign * cfg.d * dist.tail_coefficient() / (2.0 * pi);
    }
    p.keep_slices = cfg.keep_slices;
    p.budget = cfg.energy_budget;
    p.threads = cfg.threads;
    return p;
}

/* auto-doubles substeps until the local error estimate passes */
template <class Model>
void gate_substeps(const Model &m, MarchPlan &p, const PropagationConfig &cfg,
                   ConvergenceInfo &info)
{
    std::size_t sub = cfg.nt_substeps;
    for (;;) {
        double err = step_error(m, p, sub);
        if (err <= cfg.step_tolerance) {
            p.substeps = sub;
            info.step_error = err;
            return;
        }
        if (2 * sub > cfg.max_substeps) {
            throw Error(ErrorKind::StepTooCoarse,
                        "local RK4 error " + std::to_string(err) +
                            " above tolerance at max substeps");
        }
        sub *= 2;
    }
}

template <class Model>
SimulationResult run_plan(const Model &m, MarchPlan p,
                          const PropagationConfig &cfg)
{
    ConvergenceInfo info;
    gate_substeps(m, p, cfg, info);
    SimulationResult res = Marcher<Model>(m, p).run();
    info.nz = p.nz;
    info.substeps = p.substeps;
    info.nclasses = p.classes.size();
    if (cfg.convergence_gate) {
        auto metric = [&](const ComplexEnvelope &e) {
            if (cfg.gate_window.end > cfg.gate_window.begin) {
                return e.energy(cfg.gate_window.begin, cfg.gate_window.end);
            }
            return e.energy();
        };
        MarchPlan q = p;
        q.nz = 2 * p.nz;
        q.keep_slices = false;
        q.budget = false;
        auto fine = Marcher<Model>(m, q).run();
        info.gate_checked = true;
        info.metric = metric(res.output);
        info.metric_refined = metric(fine.output);
        double ref = std::max(std::abs(info.metric_refined), 1e-300);
        info.rel_change = std::abs(info.metric - info.metric_refined) / ref;
        if (info.rel_change > cfg.gate_tolerance) {
            res.convergence = info;
            throw Error(ErrorKind::ConvergenceNotMet,
                        "doubling nz changed the gate metric by " +
                            std::to_string(info.rel_change));
        }
    }
    res.convergence = info;
    return res;
}

} // namespace detail
} // namespace qmem

#endif
