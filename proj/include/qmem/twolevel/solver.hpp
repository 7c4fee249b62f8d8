#ifndef QMEM_TWOLEVEL_SOLVER_HPP
#define QMEM_TWOLEVEL_SOLVER_HPP

#include <qmem/twolevel/config.hpp>

namespace qmem {

/** Ground and excited amplitudes of one detuning class. */
struct TwoLevelState {
    cplx cg{1.0, 0.0};
    cplx ce{0.0, 0.0};

    cplx coherence() const { return std::conj(cg) * ce; }
    double norm() const { return std::norm(cg) + std::norm(ce); }
};

namespace detail {

// i d/dt (Cg, Ce) = [[0, conj(E)/2], [E/2, -Delta]] (Cg, Ce), decay on Ce:
// dCg/dt = -i conj(E)/2 Ce, dCe/dt = -i E/2 Cg + (i Delta - Gamma) Ce.
struct TwoLevelModel {
    double gamma = 0.0;
    bool inverted = false;

    State initial() const
    {
        return inverted ? State{cplx{}, cplx{1.0, 0.0}}
                        : State{cplx{1.0, 0.0}, cplx{}};
    }
    cplx lambda0(double) const { return {}; }
    cplx lambda1(double delta) const { return {-gamma, delta}; }
    bool has_control() const { return false; }
    cplx omega(double, int, double) const { return {}; }
    bool conservative() const { return gamma == 0.0; }
    double excited(const State &y) const { return std::norm(y[1]); }
    double dissipative(const State &y) const { return std::norm(y[1]); }
    double gamma_p() const { return gamma; }

    static State rhs(const State &y, cplx e, cplx)
    {
        const cplx mh(0.0, -0.5);
        return {mh * std::conj(e) * y[1], mh * e * y[0]};
    }
    static cplx coherence(const State &y) { return std::conj(y[0]) * y[1]; }

    static void coherence_real(double y0r, double y0i, double y1r,
                               double y1i, double &pr, double &pi_)
    {
        pr = y0r * y1r + y0i * y1i;
        pi_ = y0r * y1i - y0i * y1r;
    }

    static void rhs_real(double y0r, double y0i, double y1r, double y1i,
                         double er, double ei, double, double, double &k0r,
                         double &k0i, double &k1r, double &k1i)
    {
        k0r = 0.5 * (er * y1i - ei * y1r);
        k0i = -0.5 * (er * y1r + ei * y1i);
        k1r = 0.5 * (er * y0i + ei * y0r);
        k1i = -0.5 * (er * y0r - ei * y0i);
    }
};

} // namespace detail

/**
 * Integrates one class through the sampled field; returns the state at
 * every grid sample. Substeps start at `substeps` and are doubled until
 * the local error estimate is below tol.
 */
inline std::vector<TwoLevelState>
evolve_class(const TwoLevelState &init, const ComplexEnvelope &e, double delta,
             double gamma, std::size_t substeps = 4, double tol = 1e-6,
             std::size_t max_substeps = 256)
{
    require(std::abs(init.norm() - 1.0) < 1e-10,
            "evolve_class: initial state not normalized");
    e.grid.validate();
    detail::TwoLevelModel m{gamma, false};
    detail::MarchPlan p;
    p.grid = e.grid;
    p.field0 = e.samples;
    p.classes = {{delta, 1.0}};
    p.sign.assign(e.grid.n, 1);
    PropagationConfig cfg;
    cfg.nt_substeps = substeps;
    cfg.step_tolerance = tol;
    cfg.max_substeps = max_substeps;
    ConvergenceInfo info;
    detail::gate_substeps(m, p, cfg, info);

    const std::size_t sub = p.substeps;
    const std::size_t res = 2 * sub;
    const double h = e.grid.dt / static_cast<double>(sub);
    auto ef = detail::refine(e.samples, res);
    auto f = detail::class_factors(m, delta, h);
    detail::State y{init.cg, init.ce};
    std::vector<TwoLevelState> out(e.grid.n);
    out[0] = init;
    for (std::size_t i = 0; i + 1 < e.grid.n; ++i) {
        for (std::size_t q = 0; q < sub; ++q) {
            std::size_t k = i * res + 2 * q;
            detail::lawson_step<detail::TwoLevelModel>(
                y, h, f, 0, ef[k], ef[k + 1], ef[k + 2], {}, {}, {});
        }
        out[i + 1] = {y[0], y[1]};
    }
    return out;
}

/* signal plus the strong pulses of the schedule, on the signal's grid */
inline ComplexEnvelope total_field(const ComplexEnvelope &input,
                                   const ProtocolSequence &sched)
{
    ComplexEnvelope f = input;
    for (const auto &ev : sched.events) {
        if (ev.kind == EventKind::strong_pulse) {
            f += render_pulse(ev.shape, input.grid);
        }
    }
    return f;
}

/**
 * Marches the field through nz slices of an inhomogeneous two-level
 * ensemble. Strong pulses in the schedule are added to the input and
 * propagate through the same nonlinear solver.
 */
inline SimulationResult propagate(const ComplexEnvelope &input,
                                  const PropagationConfig &cfg,
                                  const DetuningDistribution &dist,
                                  const ProtocolSequence &sched)
{
    cfg.validate();
    dist.validate();
    sched.validate();
    input.grid.validate();
    auto field = total_field(input, sched);
    const bool inv = cfg.inversion == Inversion::inverted;
    detail::TwoLevelModel m{cfg.gamma, inv};
    auto plan = detail::make_plan(field, cfg, dist, sched, inv ? -1.0 : 1.0);
    return detail::run_plan(m, std::move(plan), cfg);
}

struct AreaPoint {
    double z;
    double theta;
    double energy;
};

/**
 * Pulse area per slice, projected on the phase of the entrance area so
 * that the sign stays consistent, together with the slice energy.
 */
inline std::vector<AreaPoint> pulse_area_profile(const SimulationResult &r)
{
    require(!r.slices.empty(), "pulse_area_profile: result has no slices");
    const cplx a0 = r.slices.front().area();
    const cplx ph = std::abs(a0) > 0.0 ? std::conj(a0) / std::abs(a0)
                                       : cplx{1.0, 0.0};
    std::vector<AreaPoint> out;
    out.reserve(r.slices.size());
    for (std::size_t j = 0; j < r.slices.size(); ++j) {
        out.push_back({r.z[j], std::real(r.slices[j].area() * ph),
                       r.slices[j].energy()});
    }
    return out;
}

} // namespace qmem

#endif
