#ifndef QMEM_THREELEVEL_SOLVER_HPP
#define QMEM_THREELEVEL_SOLVER_HPP

#include <qmem/threelevel/control.hpp>
#include <qmem/twolevel/config.hpp>

namespace qmem {

/** Optical coherence P and spin coherence S of one class. */
struct LambdaState {
    cplx p{};
    cplx s{};
};

namespace detail {

// dP/dt = (i Delta - Gamma) P - i Omega/2 S - i E/2
// dS/dt = -i conj(Omega)/2 P + (i delta - gamma_s) S
struct LambdaModel {
    const ControlSchedule *ctrl = nullptr;
    double gamma = 0.0;
    double gamma_s = 0.0;

    State initial() const { return {cplx{}, cplx{}}; }
    cplx lambda0(double delta) const { return {-gamma, delta}; }
    cplx lambda1(double) const { return {-gamma_s, ctrl->delta_two}; }
    bool has_control() const { return !ctrl->empty(); }
    cplx omega(double t, int side, double tol) const
    {
        return ctrl->omega(t, side, tol);
    }
    bool conservative() const { return false; }
    double excited(const State &y) const
    {
        return std::norm(y[0]) + std::norm(y[1]);
    }
    double dissipative(const State &y) const { return std::norm(y[0]); }
    double gamma_p() const { return gamma; }

    static State rhs(const State &y, cplx e, cplx om)
    {
        const cplx mh(0.0, -0.5);
        return {mh * (om * y[1] + e), mh * std::conj(om) * y[0]};
    }
    static cplx coherence(const State &y) { return y[0]; }

    static void coherence_real(double y0r, double y0i, double, double,
                               double &pr, double &pi_)
    {
        pr = y0r;
        pi_ = y0i;
    }

    static void rhs_real(double y0r, double y0i, double y1r, double y1i,
                         double er, double ei, double wr, double wi,
                         double &k0r, double &k0i, double &k1r, double &k1i)
    {
        k0r = 0.5 * (wr * y1i + wi * y1r + ei);
        k0i = -0.5 * (wr * y1r - wi * y1i + er);
        k1r = 0.5 * (wr * y0i - wi * y0r);
        k1i = -0.5 * (wr * y0r + wi * y0i);
    }
};

} // namespace detail

/**
 * Integrates one class through the sampled signal with the analytic
 * control schedule; returns (P, S) at every sample.
 */
inline std::vector<LambdaState>
evolve_lambda(const LambdaState &init, const ComplexEnvelope &e,
              const ControlSchedule &ctrl, double gamma,
              std::size_t substeps = 4, double tol = 1e-6,
              std::size_t max_substeps = 1024)
{
    e.grid.validate();
    ctrl.validate();
    detail::LambdaModel m{&ctrl, gamma, 0.0};
    detail::MarchPlan p;
    p.grid = e.grid;
    p.field0 = e.samples;
    p.classes = {{ctrl.delta_one, 1.0}};
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
    auto om = detail::control_track(m, e.grid, res);
    auto L = [&](std::size_t k) { return om.empty() ? cplx{} : om.lo[k]; };
    auto H = [&](std::size_t k) { return om.empty() ? cplx{} : om.hi[k]; };
    auto f = detail::class_factors(m, ctrl.delta_one, h);
    detail::State y{init.p, init.s};
    std::vector<LambdaState> out(e.grid.n);
    out[0] = init;
    for (std::size_t i = 0; i + 1 < e.grid.n; ++i) {
        for (std::size_t q = 0; q < sub; ++q) {
            std::size_t k = i * res + 2 * q;
            detail::lawson_step<detail::LambdaModel>(
                y, h, f, 0, ef[k], ef[k + 1], ef[k + 2], H(k), H(k + 1),
                L(k + 2));
        }
        out[i + 1] = {y[0], y[1]};
    }
    return out;
}

/**
 * Perturbative Lambda-system propagation. A delta_resonant distribution
 * selects the homogeneous form dE/dz = -i alpha Gamma P with the class at
 * the schedule's one-photon detuning; otherwise classes are offset by it
 * and the inhomogeneous source is used.
 */
inline SimulationResult propagate_lambda(const ComplexEnvelope &input,
                                         const PropagationConfig &cfg,
                                         const DetuningDistribution &dist,
                                         const ControlSchedule &ctrl,
                                         double spin_decay = 0.0)
{
    cfg.validate();
    ctrl.validate();
    input.grid.validate();
    DetuningDistribution dd = dist;
    if (dd.homogeneous()) {
        dd.delta0 = ctrl.delta_one;
    }
    detail::LambdaModel m{&ctrl, cfg.gamma, spin_decay};
    auto plan = detail::make_plan(input, cfg, dd, ProtocolSequence{}, 1.0);
    if (!dd.homogeneous()) {
        for (auto &c : plan.classes) {
            c.delta += ctrl.delta_one;
        }
    }
    return detail::run_plan(m, std::move(plan), cfg);
}

} // namespace qmem

#endif
