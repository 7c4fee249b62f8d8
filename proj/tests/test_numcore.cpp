#include <gtest/gtest.h>

#include <qmem/numcore/bessel.hpp>
#include <qmem/numcore/efficiency.hpp>
#include <qmem/numcore/transfer.hpp>
#include <qmem/twolevel/solver.hpp>

using namespace qmem;

namespace {

ComplexEnvelope chirped(const TimeGrid &g)
{
    ComplexEnvelope e(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        double t = g.time(i);
        e[i] = std::exp(-t * t / 2.0) * std::polar(1.0, 0.3 * t * t + 0.2 * t);
    }
    return e;
}

} // namespace

TEST(Fourier, MatchesDirectSum)
{
    TimeGrid g{-12.0, 0.1, 256};
    auto e = chirped(g);
    auto s = forward_transform(e);
    for (std::size_t k = 0; k < g.n; k += 7) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            acc += e[i] * std::polar(1.0, -g.omega(k) * g.time(i)) * g.dt;
        }
        EXPECT_NEAR(std::abs(s.values[k] - acc), 0.0, 1e-10) << k;
    }
}

TEST(Fourier, RoundTripAndParseval)
{
    TimeGrid g{-20.0, 0.05, 1024};
    auto e = chirped(g);
    auto s = forward_transform(e);
    EXPECT_NEAR(s.energy() / e.energy(), 1.0, 1e-10);
    auto back = inverse_transform(s);
    double m = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        m = std::max(m, std::abs(back[i] - e[i]));
    }
    EXPECT_LT(m, 1e-12);
}

TEST(Transfer, OpticalDepthsCompose)
{
    auto p = gaussian_pulse(0.0, 10.0, 0.1);
    auto g = TimeGrid::covering(p.t_begin(1e-9), p.t_end(1e-9) + 60.0, 0.5);
    auto in = render_pulse(p, g);
    for (auto make : {inverted_lorentzian, lorentzian}) {
        auto two = apply_transfer(apply_transfer(in, make(7.0, 1.0)), make(5.0, 1.0));
        auto one = apply_transfer(in, make(12.0, 1.0));
        double m = 0.0;
        double pk = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            m = std::max(m, std::abs(two[i] - one[i]));
            pk = std::max(pk, std::abs(one[i]));
        }
        EXPECT_LT(m / pk, 1e-10);
    }
}

TEST(Transfer, InvertedLorentzianIsDelay)
{
    auto p = gaussian_pulse(0.0, 20.0, 0.1);
    auto g = TimeGrid::covering(p.t_begin(1e-9), p.t_end(1e-9) + 60.0, 0.5);
    auto in = render_pulse(p, g);
    auto out = apply_transfer(in, inverted_lorentzian(20.0, 1.0));
    double delay = out.first_moment() - in.first_moment();
    EXPECT_NEAR(delay, 10.0, 0.2);
}

TEST(Transfer, AliasRiskOnCoarseGrid)
{
    TimeGrid g{-3.0, 0.5, 16};
    ComplexEnvelope coarse(g);
    coarse[6] = 1.0;
    try {
        apply_transfer(coarse, lorentzian(1.0, 1.0));
        FAIL() << "expected AliasRisk";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::AliasRisk);
    }
}

TEST(Bessel, J1AgainstStd)
{
    for (double x : {0.0, 0.1, 1.0, 2.5, 7.3, 15.0, 40.0}) {
        EXPECT_NEAR(bessel_j1(x), std::cyl_bessel_j(1.0, x), 1e-12) << x;
    }
}

TEST(Bessel, ConvolutionMatchesTransfer)
{
    auto p = gaussian_pulse(0.0, 0.05, 0.1);
    auto g = TimeGrid::covering(p.t_begin(1e-9), 65.0, 0.005);
    auto in = render_pulse(p, g);
    auto conv = convolve_lorentzian(in, 20.0, 1.0);
    auto tf = apply_transfer(in, lorentzian(20.0, 1.0));
    EXPECT_LT(relative_l2(conv, tf, 0.05, g.t_end()), 0.01);
}

TEST(Efficiency, ShadedAreaClampsAndSubtracts)
{
    TimeGrid g{0.0, 0.01, 1001};
    ComplexEnvelope in(g);
    ComplexEnvelope out(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        in[i] = g.time(i) < 5.0 ? 1.0 : 0.0;
        out[i] = g.time(i) >= 5.0 ? 0.5 : 0.0;
    }
    EXPECT_NEAR(shaded_area_efficiency(in, out, 5.0), 0.25 * 5.0 / in.energy(), 1e-3);
    EXPECT_EQ(shaded_area_efficiency(out, in, 5.0), 0.0);
}

TEST(Distribution, FlatBandGivesBeerLaw)
{
    auto g = TimeGrid::covering(-8.0, 30.0, 0.05);
    auto in = render_pulse(gaussian_pulse(0.0, 1.0, pi / 200.0), g);
    PropagationConfig cfg;
    cfg.d = 2.0;
    auto dist = DetuningDistribution::sized(DistributionKind::flat, 1.0, 40.0, 38.0, 4.0);
    auto r = propagate(in, cfg, dist, {});
    EXPECT_NEAR(r.output.energy() / in.energy(), std::exp(-2.0), 0.01 * std::exp(-2.0));
}

TEST(Grid, CoveringIsPowerOfTwo)
{
    auto g = TimeGrid::covering(-1.0, 9.0, 0.013);
    EXPECT_EQ(g.n & (g.n - 1), 0u);
    EXPECT_LE(g.dt, 0.013);
    EXPECT_NEAR(g.t_end(), 9.0, 1e-12);
}

TEST(Pulse, RenderedAreaAndClipping)
{
    auto g = TimeGrid::covering(-10.0, 10.0, 0.01);
    auto e = render_pulse(gaussian_pulse(0.0, 1.0, pi), g);
    EXPECT_NEAR(std::abs(e.area()), pi, 1e-9);
    auto r = render_pulse(rising_exponential_pulse(0.0, 0.5, 1.0), g);
    EXPECT_NEAR(std::abs(r.area()), 1.0, 1e-8);
    try {
        render_pulse(gaussian_pulse(0.0, 3.0, pi), g);
        FAIL() << "expected GridTooShort";
    } catch (const Error &x) {
        EXPECT_EQ(x.kind(), ErrorKind::GridTooShort);
    }
}
