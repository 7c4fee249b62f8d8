#include <gtest/gtest.h>

#include <qmem/echo/protocols.hpp>

using namespace qmem;

namespace {

const PulseShape signal_pulse = gaussian_pulse(0.0, 1.0, pi / 20.0);

EchoConfig config(double d)
{
    EchoConfig c;
    c.prop.d = d;
    return c;
}

template <class F>
ErrorKind kind_of(F f)
{
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    return ErrorKind::RegimeWarning;
}

} // namespace

TEST(Analytic, ClosedForms)
{
    for (double d : {0.0, 0.3, 1.0, 2.0, 5.0}) {
        double s = std::sinh(d / 2);
        EXPECT_NEAR(analytic_efficiency(EchoProtocol::tpe, d), 4 * s * s, 1e-12);
        EXPECT_NEAR(analytic_efficiency(EchoProtocol::crib_fwd, d), d * d * std::exp(-d), 1e-12);
        double b = 1 - std::exp(-d);
        EXPECT_NEAR(analytic_efficiency(EchoProtocol::crib_bwd, d), b * b, 1e-12);
    }
    EXPECT_NEAR(analytic_efficiency(EchoProtocol::crib_fwd, 2.0), 0.5413, 1e-4);
    EXPECT_THROW(analytic_efficiency(EchoProtocol::tpe, -1.0), Error);
}

TEST(PhaseMatch, CollinearAndNoncollinear)
{
    WaveVectorSet k;
    auto e = phase_match(PhaseMatchProtocol::tpe, k);
    ASSERT_TRUE(e.has_value());
    EXPECT_EQ((*e)[0], 1.0);
    k.k2 = {0.0, 1.0, 0.0};
    EXPECT_FALSE(phase_match(PhaseMatchProtocol::tpe, k).has_value());
    k.k3 = {0.0, 1.0, 0.0};
    auto r = phase_match(PhaseMatchProtocol::rose, k);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR((*r)[0], 1.0, 1e-12);
    k.k1 = {2.0, 0.0, 0.0};
    EXPECT_THROW(phase_match(PhaseMatchProtocol::rose, k), Error);
}

TEST(Crib, ForwardMatchesClosedForm)
{
    for (double d : {0.5, 1.0, 2.0, 4.0}) {
        auto r = run_crib(config(d), signal_pulse, 8.0, Direction::forward);
        EXPECT_NEAR(r.numeric / r.analytic, 1.0, 0.02) << d;
        EXPECT_NEAR(r.echo_time, 16.0, 0.5);
        EXPECT_LE(r.mean_excited, 4.0 * std::pow(signal_pulse.area, 2));
    }
}

TEST(Crib, BackwardMatchesClosedForm)
{
    for (double d : {1.0, 3.0}) {
        auto r = run_crib(config(d), signal_pulse, 8.0, Direction::backward);
        EXPECT_NEAR(r.numeric / analytic_efficiency(EchoProtocol::crib_bwd, d), 1.0, 0.02) << d;
    }
}

TEST(Crib, GridIndependence)
{
    auto base = run_crib(config(2.0), signal_pulse, 8.0, Direction::forward).numeric;
    auto c = config(2.0);
    c.prop.nz *= 2;
    EXPECT_NEAR(run_crib(c, signal_pulse, 8.0, Direction::forward).numeric / base, 1.0, 0.01);
    c = config(2.0);
    c.class_margin *= 2;
    EXPECT_NEAR(run_crib(c, signal_pulse, 8.0, Direction::forward).numeric / base, 1.0, 0.01);
    c = config(2.0);
    c.prop.nt_substeps = 2;
    EXPECT_NEAR(run_crib(c, signal_pulse, 8.0, Direction::forward).numeric / base, 1.0, 0.01);
}

TEST(Crib, EchoIsLinearInSignal)
{
    auto small = gaussian_pulse(0.0, 1.0, 1e-4 * pi);
    auto a = run_crib(config(2.0), small, 8.0, Direction::forward);
    for (double l : {0.5, 2.0}) {
        auto b = run_crib(config(2.0), gaussian_pulse(0.0, 1.0, l * 1e-4 * pi), 8.0,
                          Direction::forward);
        double m = 0.0;
        double pk = 0.0;
        for (std::size_t i = 0; i < a.output.size(); ++i) {
            m = std::max(m, std::abs(b.output[i] - l * a.output[i]));
            pk = std::max(pk, std::abs(l * a.output[i]));
        }
        EXPECT_LT(m / pk, 1e-6) << l;
    }
}

TEST(Crib, FlipDuringSignalRejected)
{
    EXPECT_EQ(kind_of([] { run_crib(config(1.0), signal_pulse, 2.0, Direction::forward); }),
              ErrorKind::FlipDuringSignal);
}

TEST(TwoPulseEcho, BelowAnalyticAndInverting)
{
    auto r = run_2pe(config(1.0), signal_pulse, gaussian_pulse(0.0, 0.1, pi), 8.0);
    EXPECT_LT(r.numeric, r.analytic);
    EXPECT_GT(r.numeric, 0.0);
    EXPECT_NEAR(r.predicted_echo_time, 16.0, 1e-12);
    EXPECT_GE(r.min_excited, 0.9);
}

TEST(TwoPulseEcho, Preconditions)
{
    EXPECT_EQ(kind_of([] {
                  run_2pe(config(1.0), gaussian_pulse(0.0, 1.0, pi / 2), gaussian_pulse(0.0, 0.5, pi), 8.0);
              }),
              ErrorKind::PerturbativeViolation);
    EXPECT_EQ(kind_of([] {
                  run_2pe(config(1.0), signal_pulse, gaussian_pulse(0.0, 0.5, 0.9 * pi), 8.0);
              }),
              ErrorKind::Validation);
}

TEST(Rose, EchoTimeFollowsPulseSpacing)
{
    auto pi_pulse = gaussian_pulse(0.0, 0.2, pi);
    for (auto [t2, t3] : {std::pair{8.0, 24.0}, std::pair{10.0, 26.0}}) {
        auto r = run_rose(config(1.0), signal_pulse, {t2, t3, pi_pulse, pi_pulse});
        EXPECT_NEAR(r.echo_time, 2.0 * (t3 - t2), 0.5) << t2;
        // two finite pi pulses each miss part of the band
        EXPECT_LT(r.numeric / r.analytic, 1.02);
        EXPECT_GT(r.numeric / r.analytic, 0.8);
        EXPECT_LE(r.mean_excited, 4.0 * std::pow(signal_pulse.area, 2));
    }
}

TEST(Rose, OrderingViolation)
{
    auto p = gaussian_pulse(0.0, 0.2, pi);
    EXPECT_EQ(kind_of([&] { run_rose(config(1.0), signal_pulse, {8.0, 6.0, p, p}); }),
              ErrorKind::OrderingViolation);
    EXPECT_EQ(kind_of([&] { validate_rose(config(1.0), signal_pulse, {8.0, 10.0, p, p}); }),
              ErrorKind::OrderingViolation);
}
