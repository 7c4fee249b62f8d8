#include <gtest/gtest.h>

#include <qmem/threelevel/solver.hpp>
#include <qmem/threelevel/susceptibility.hpp>
#include <qmem/twolevel/solver.hpp>

using namespace qmem;

TEST(Susceptibility, EitNearTransparencyIsInvertedLorentzian)
{
    LambdaParams p{20.0, 1.0, std::sqrt(0.2), 0.0, 0.0};
    const double ge = eit_width(p.omega_c, p.gamma);
    ASSERT_LE(ge, p.gamma / 10.0);
    auto il = inverted_lorentzian(p.d, ge);
    for (int i = -50; i <= 50; ++i) {
        if (i == 0) {
            continue;
        }
        double w = 0.5 * ge * i / 50.0;
        cplx a = susceptibility(LambdaKind::eit, w, p).exponent;
        cplx b = il.exponent(w);
        EXPECT_LT(std::abs(a - b) / std::abs(b), 0.05) << w;
    }
}

TEST(Susceptibility, RamanLineIsShiftedLorentzian)
{
    LambdaParams p{20.0, 1.0, 20.0, 100.0, 1.0};
    const double gr = raman_width(p.omega_c, p.gamma, p.big_delta);
    const double w0 = p.small_delta - light_shift(p.omega_c, p.big_delta);
    auto lz = lorentzian(p.d, gr);
    double peak = std::abs(lz.exponent(0.0));
    for (int i = -50; i <= 50; ++i) {
        double x = 5.0 * gr * i / 50.0;
        cplx a = susceptibility(LambdaKind::raman, w0 + x, p).exponent;
        EXPECT_LT(std::abs(a - lz.exponent(x)) / peak, 0.05) << x;
    }
    EXPECT_TRUE(susceptibility(LambdaKind::raman, 0.0, p).warnings.empty());
    p.big_delta = 5.0;
    EXPECT_EQ(susceptibility(LambdaKind::raman, 0.0, p).warnings.size(), 1u);
}

TEST(Lambda, ControlOffReducesToTwoLevel)
{
    auto g = TimeGrid::covering(-8.0, 40.0, 0.05);
    auto in = render_pulse(gaussian_pulse(0.0, 1.0, 1e-5), g);
    PropagationConfig cfg;
    cfg.d = 3.0;
    cfg.gamma = 1.0;
    auto dist = DetuningDistribution::homogeneous_at(0.0);
    auto a = propagate(in, cfg, dist, {});
    ControlSchedule off;
    auto b = propagate_lambda(in, cfg, dist, off, 0.0);
    double m = 0.0;
    double pk = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        m = std::max(m, std::abs(a.output[i] - b.output[i]));
        pk = std::max(pk, std::abs(a.output[i]));
    }
    EXPECT_LT(m / pk, 1e-8);
    auto tr = evolve_lambda({0.0, 0.0}, in, off, 1.0);
    for (const auto &s : tr) {
        ASSERT_EQ(s.s, cplx(0.0, 0.0));
    }
}

TEST(Lambda, EnergyBookkeeping)
{
    auto in = render_pulse(gaussian_pulse(0.0, 10.0, pi / 20.0), TimeGrid::covering(-80.0, 140.0, 0.05));
    PropagationConfig cfg;
    cfg.d = 20.0;
    cfg.gamma = 4.0;
    cfg.energy_budget = true;
    cfg.max_substeps = 256;
    auto ctl = ControlSchedule::constant(4.0, -90.0, 5.0);
    auto r = propagate_lambda(in, cfg, DetuningDistribution::homogeneous_at(0.0), ctl);
    const auto &g = in.grid;
    const double ein = in.energy();
    double cin = 0.0;
    double cout = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        cin += std::norm(in[i]) * g.dt;
        cout += std::norm(r.output[i]) * g.dt;
        EXPECT_NEAR(cin, cout + r.stored[i] + r.decayed[i], 0.01 * ein) << g.time(i);
    }
    EXPECT_GT(r.stored.back(), 0.3 * ein);
}
