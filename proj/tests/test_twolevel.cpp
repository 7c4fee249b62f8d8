#include <gtest/gtest.h>

#include <qmem/echo/analytic.hpp>
#include <qmem/numcore/transfer.hpp>
#include <qmem/twolevel/solver.hpp>

using namespace qmem;

namespace {

/* single-atom Bloch equations, plain RK4 with a fine fixed step */
std::pair<cplx, cplx> fine_bloch(const PulseShape &p, double delta, double t0,
                                 double t1, std::size_t steps)
{
    const cplx I(0.0, 1.0);
    auto f = [&](double t, cplx cg, cplx ce) {
        cplx e = p.value(t);
        return std::pair<cplx, cplx>{-I * 0.5 * std::conj(e) * ce,
                                     I * delta * ce - I * 0.5 * e * cg};
    };
    cplx cg = 1.0;
    cplx ce = 0.0;
    const double h = (t1 - t0) / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        double t = t0 + h * static_cast<double>(i);
        auto [a1, b1] = f(t, cg, ce);
        auto [a2, b2] = f(t + h / 2, cg + h / 2 * a1, ce + h / 2 * b1);
        auto [a3, b3] = f(t + h / 2, cg + h / 2 * a2, ce + h / 2 * b2);
        auto [a4, b4] = f(t + h, cg + h * a3, ce + h * b3);
        cg += h / 6 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        ce += h / 6 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    return {cg, ce};
}

} // namespace

TEST(EvolveClass, MatchesFineStepOde)
{
    auto p = gaussian_pulse(0.0, 1.0, 0.8 * pi);
    auto g = TimeGrid::covering(-8.0, 8.0, 0.05);
    auto e = render_pulse(p, g);
    for (double delta : {0.0, 0.7, -2.0}) {
        auto tr = evolve_class({1.0, 0.0}, e, delta, 0.0, 4, 1e-10, 1 << 12);
        auto [cg, ce] = fine_bloch(p, delta, g.t0, g.t_end(), 200000);
        EXPECT_NEAR(std::norm(tr.back().ce), std::norm(ce), 1e-6) << delta;
        EXPECT_NEAR(std::abs(tr.back().coherence() - std::conj(cg) * ce), 0.0, 1e-5)
            << delta;
    }
}

TEST(EvolveClass, PiPulseInverts)
{
    auto g = TimeGrid::covering(-8.0, 8.0, 0.02);
    auto e = render_pulse(gaussian_pulse(0.0, 1.0, pi), g);
    auto tr = evolve_class({1.0, 0.0}, e, 0.0, 0.0, 4, 1e-10, 1 << 12);
    EXPECT_NEAR(std::norm(tr.back().ce), 1.0, 1e-8);
}

TEST(Propagate, NormConservedForStrongPulse)
{
    auto g = TimeGrid::covering(-6.0, 30.0, 0.05);
    ComplexEnvelope none(g);
    ProtocolSequence s;
    s.events.push_back({EventKind::strong_pulse, 8.0, gaussian_pulse(8.0, 0.5, pi)});
    PropagationConfig cfg;
    cfg.d = 2.0;
    cfg.step_tolerance = 1e-9;
    cfg.max_substeps = 256;
    auto dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, 20.0, 36.0, 4.0);
    auto r = propagate(none, cfg, dist, s);
    EXPECT_LT(r.max_norm_deviation, 1e-8);
}

TEST(Propagate, SmallAreaDecaysAsBeerLaw)
{
    auto g = TimeGrid::covering(-8.0, 40.0, 0.05);
    auto in = render_pulse(gaussian_pulse(0.0, 1.0, pi / 20.0), g);
    for (double d : {0.5, 2.0}) {
        PropagationConfig cfg;
        cfg.d = d;
        cfg.keep_slices = true;
        auto dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, 20.0, 48.0, 4.0);
        auto prof = pulse_area_profile(propagate(in, cfg, dist, {}));
        EXPECT_NEAR(prof.back().theta / prof.front().theta, std::exp(-d / 2), 0.02 * std::exp(-d / 2));
    }
}

TEST(Propagate, TwoPiSechKeepsArea)
{
    auto g = TimeGrid::covering(-22.0, 40.0, 0.02);
    auto in = render_pulse(sech_pulse(0.0, 1.0, 2.0 * pi, 0.0), g);
    PropagationConfig cfg;
    cfg.d = 2.0;
    cfg.keep_slices = true;
    auto dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, 20.0, 62.0, 4.0);
    auto prof = pulse_area_profile(propagate(in, cfg, dist, {}));
    EXPECT_NEAR(prof.back().theta / prof.front().theta, 1.0, 0.01);
}

TEST(Propagate, HomogeneousMatchesLorentzianTransfer)
{
    auto g = TimeGrid::covering(-8.0, 40.0, 0.05);
    auto in = render_pulse(gaussian_pulse(0.0, 1.0, 1e-4), g);
    PropagationConfig cfg;
    cfg.d = 3.0;
    cfg.gamma = 1.0;
    auto r = propagate(in, cfg, DetuningDistribution::homogeneous_at(0.0), {});
    auto tf = apply_transfer(in, lorentzian(3.0, 1.0));
    EXPECT_NEAR(r.output.energy() / tf.energy(), 1.0, 0.01);
}

TEST(Propagate, LinearInWeakInput)
{
    auto g = TimeGrid::covering(-8.0, 30.0, 0.05);
    auto dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, 20.0, 38.0, 4.0);
    PropagationConfig cfg;
    cfg.d = 2.0;
    auto base = propagate(render_pulse(gaussian_pulse(0.0, 1.0, 1e-4 * pi), g), cfg, dist, {});
    for (double l : {0.5, 2.0}) {
        auto r = propagate(render_pulse(gaussian_pulse(0.0, 1.0, l * 1e-4 * pi), g), cfg, dist, {});
        double m = 0.0;
        double pk = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            m = std::max(m, std::abs(r.output[i] - l * base.output[i]));
            pk = std::max(pk, std::abs(l * base.output[i]));
        }
        EXPECT_LT(m / pk, 1e-6) << l;
    }
}

TEST(Propagate, EulerAndTrapezoidAgreeWhenRefined)
{
    auto g = TimeGrid::covering(-8.0, 30.0, 0.05);
    auto in = render_pulse(gaussian_pulse(0.0, 1.0, pi / 20.0), g);
    auto dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, 20.0, 38.0, 4.0);
    PropagationConfig a;
    a.d = 1.0;
    a.nz = 400;
    a.z_scheme = ZScheme::euler;
    PropagationConfig b = a;
    b.nz = 50;
    b.z_scheme = ZScheme::trapezoid;
    double ea = propagate(in, a, dist, {}).output.energy();
    double eb = propagate(in, b, dist, {}).output.energy();
    EXPECT_NEAR(ea / eb, 1.0, 0.01);
}

TEST(Propagate, ConvergenceGateReportsChange)
{
    auto g = TimeGrid::covering(-8.0, 30.0, 0.05);
    auto in = render_pulse(gaussian_pulse(0.0, 1.0, pi / 20.0), g);
    auto dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, 20.0, 38.0, 4.0);
    PropagationConfig cfg;
    cfg.d = 2.0;
    cfg.convergence_gate = true;
    auto r = propagate(in, cfg, dist, {});
    EXPECT_TRUE(r.convergence.gate_checked);
    EXPECT_LT(r.convergence.rel_change, 0.01);
    cfg.nz = 20;
    cfg.z_scheme = ZScheme::euler;
    cfg.d = 4.0;
    cfg.gate_tolerance = 1e-4;
    try {
        propagate(in, cfg, dist, {});
        FAIL() << "expected ConvergenceNotMet";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConvergenceNotMet);
    }
}

TEST(AreaTheorem, PiIsFixedPoint)
{
    auto ref = area_theorem_reference(pi, 3.0);
    EXPECT_EQ(ref.back().theta, pi);
    auto small = area_theorem_reference(0.01, 2.0);
    EXPECT_NEAR(small.back().theta / 0.01, std::exp(-1.0), 1e-4);
}
