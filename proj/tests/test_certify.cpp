#include <gtest/gtest.h>

#include <qmem/certify/chain.hpp>
#include <qmem/certify/counting.hpp>

using namespace qmem;

namespace {

double oracle_g2_memory(double eta_d, double p_dc, double eta_m)
{
    auto s = PhotonState::fock(1, 4).thinned(0, eta_m).split(0);
    double both = povm_clicks(s, {{0, eta_d, p_dc}, {1, eta_d, p_dc}});
    double a = povm_click(s, 0, eta_d, p_dc);
    double b = povm_click(s, 1, eta_d, p_dc);
    return both / (a * b);
}

double oracle_g2_2pe(double d, double eta)
{
    auto s = PhotonState::two_mode_thermal(std::expm1(d), 400).split(0);
    double both = povm_clicks(s, {{0, eta, 0.0}, {1, eta, 0.0}});
    double a = povm_click(s, 0, eta, 0.0);
    return both / (a * a);
}

double oracle_cauchy_schwarz(const DetectorModel &da, const DetectorModel &db, double p)
{
    // modes: a1, b1, a2, b2
    auto s = PhotonState::two_mode_squeezed(p, 20)
                 .thinned(0, da.eta_m)
                 .thinned(1, db.eta_m)
                 .split(0)
                 .split(1);
    ClickDetector a1{0, da.eta_d, da.p_dc};
    ClickDetector a2{2, da.eta_d, da.p_dc};
    ClickDetector b1{1, db.eta_d, db.p_dc};
    ClickDetector b2{3, db.eta_d, db.p_dc};
    double cross = povm_clicks(s, {a1, b1});
    double aa = povm_clicks(s, {a1, a2});
    double bb = povm_clicks(s, {b1, b2});
    return cross * cross / (aa * bb);
}

double oracle_bell(const DetectorModel &da, const DetectorModel &db, double p)
{
    // modes: aH, bV, aV, bH
    auto pair = PhotonState::two_mode_squeezed(p, 20);
    auto s = PhotonState::product(pair, pair);
    ClickDetector ah{0, da.total(), da.p_dc};
    double orth = povm_clicks(s, {ah, {1, db.total(), db.p_dc}});
    double same = povm_clicks(s, {ah, {3, db.total(), db.p_dc}});
    return (orth - same) / (orth + same);
}

} // namespace

TEST(PhotonState, ThinningAndSplitAreBinomial)
{
    auto s = PhotonState::fock(3, 5).thinned(0, 0.4);
    EXPECT_NEAR(s.at({2}), 3 * 0.16 * 0.6, 1e-15);
    auto t = PhotonState::fock(2, 5).split(0);
    EXPECT_NEAR(t.at({1, 1}), 0.5, 1e-15);
    EXPECT_NEAR(t.at({2, 0}), 0.25, 1e-15);
    EXPECT_NEAR(t.total(), 1.0, 1e-15);
    EXPECT_THROW(povm_click(PhotonState::thermal(5.0, 10), 0, 1.0, 0.0), Error);
}

TEST(Counting, G2MemoryMatchesOracle)
{
    for (double eta_d : {0.2, 0.6, 1.0}) {
        for (double p_dc : {0.0, 0.01, 0.1}) {
            for (double eta_m : {0.3, 0.7, 1.0}) {
                double v = g2_memory({eta_d, p_dc, eta_m}).value;
                EXPECT_NEAR(v, oracle_g2_memory(eta_d, p_dc, eta_m), 1e-10);
            }
        }
    }
    EXPECT_NEAR(g2_memory({0.3, 0.0, 0.5}).value, 0.0, 1e-12);
    auto c = g2_memory({0.3, 0.01, 0.5}, true);
    EXPECT_NEAR(c.value, oracle_g2_memory(0.3, 0.01, 1.0), 1e-12);
}

TEST(Counting, G2MemoryLimitsAndMonotone)
{
    // dark counts are independent per detector, so the ratio stays below 1
    const double e = 1e-3;
    for (double p : {2.5 * e, 3.0 * e, 3.5 * e, 10.0 * e}) {
        EXPECT_LT(g2_memory({e, p, 1.0}).value, 1.0) << p;
    }
    for (double eps : {0.1, 0.01}) {
        EXPECT_NEAR(g2_memory({1.0, 1.0 - eps, 1.0}).value, 1.0 - eps * eps / 4, eps * eps * eps);
    }
    double prev = -1.0;
    for (double p = 0.0; p < 0.5; p += 0.01) {
        double v = g2_memory({0.5, p, 0.5}).value;
        EXPECT_GT(v, prev);
        prev = v;
    }
    prev = 1e9;
    for (double eta = 0.05; eta <= 1.0; eta += 0.05) {
        double v = g2_memory({eta, 0.01, 1.0}).value;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Counting, G2TwoPulseEchoMatchesOracle)
{
    for (double d : {0.1, 0.5, 1.0}) {
        for (double eta : {0.1, 0.5, 1.0}) {
            EXPECT_NEAR(g2_2pe(d, eta), oracle_g2_2pe(d, eta), 1e-10) << d << " " << eta;
        }
    }
    EXPECT_NEAR(g2_2pe(1e-3, 1.0), 1.5, 1e-3);
    EXPECT_NEAR(g2_2pe(8.0, 1.0), 1.0, 1e-3);
    EXPECT_NEAR(click_probability_2pe(2.0, 0.5), 1.0 - 1.0 / 2.25, 1e-15);
}

TEST(Counting, CauchySchwarzMatchesOracle)
{
    for (double eta : {0.3, 0.7, 1.0}) {
        for (double pdc : {0.0, 0.001, 0.02}) {
            for (double p : {0.01, 0.05, 0.2}) {
                DetectorModel da{eta, pdc, 0.6};
                DetectorModel db{0.9 * eta, 2 * pdc, 1.0};
                EXPECT_NEAR(cauchy_schwarz(da, db, p).value, oracle_cauchy_schwarz(da, db, p),
                            1e-10 * std::max(1.0, cauchy_schwarz(da, db, p).value));
            }
        }
    }
    const double p = 1e-3;
    double r = cauchy_schwarz({}, {}, p).value;
    double lim = 0.25 * (1 + 1 / p) * (1 + 1 / p);
    EXPECT_NEAR(r / lim, 1.0, 0.005);
}

TEST(Counting, BellVisibilityMatchesOracle)
{
    for (double eta : {0.3, 0.7, 1.0}) {
        for (double pdc : {0.0, 0.001, 0.02}) {
            for (double p : {0.01, 0.05, 0.2}) {
                DetectorModel da{eta, pdc, 0.8};
                DetectorModel db{eta, pdc, 1.0};
                EXPECT_NEAR(bell_visibility(da, db, p).value, oracle_bell(da, db, p), 1e-10);
            }
        }
    }
    EXPECT_NEAR(bell_visibility({}, {}, 0.01).value, 0.99 / 1.01, 1e-10);
}

TEST(Counting, SqueezingConversion)
{
    EXPECT_NEAR(mean_from_squeezing(squeezing_from_mean(0.3)), 0.3, 1e-14);
}

TEST(TransferVariance, CribAndTwoPulseEcho)
{
    auto far = tv_criterion(TvProtocol::crib, {30.0});
    EXPECT_NEAR(far.value, 2.0, 1e-10);
    EXPECT_NEAR(far.second, 0.0, 1e-10);
    auto zero = tv_criterion(TvProtocol::crib, {0.0});
    EXPECT_EQ(zero.value, 0.0);
    EXPECT_EQ(zero.second, 1.0);
    EXPECT_TRUE(tv_criterion(TvProtocol::crib, {1.3}).passes_quantum);
    for (int i = 0; i < 100; ++i) {
        double d = 0.1 + 9.9 * i / 99.0;
        EXPECT_FALSE(tv_criterion(TvProtocol::tpe, {d}).passes_quantum) << d;
    }
}

TEST(TransferVariance, SlowLightDegenerate)
{
    TvParams p;
    p.alpha = 0.5;
    p.beta = 0.5;
    auto r = tv_criterion(TvProtocol::slowlight, p);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_EQ(r.warnings[0].kind, ErrorKind::DegenerateGainLoss);
    p.beta = 0.5 + 1e-9;
    auto n = tv_criterion(TvProtocol::slowlight, p);
    EXPECT_NEAR(n.value, r.value, 1e-8);
    EXPECT_NEAR(n.second, r.second, 1e-8);
    EXPECT_TRUE(r.consistency_flag);
}

TEST(Chain, ExcitationConservedExactly)
{
    ChainModel m{12, 1.5};
    auto s = FockChainState::photons(12, 3, 3);
    for (auto dir : {ChainDirection::forward, ChainDirection::backward}) {
        auto out = chain_propagate(s, m, dir);
        auto w = out.excitation_weights();
        ASSERT_EQ(w.size(), 1u);
        EXPECT_NEAR(w[3], 1.0, 1e-12);
        EXPECT_NEAR(out.norm(), 1.0, 1e-12);
    }
}

TEST(Chain, RecursionMatchesStateVector)
{
    ChainModel m{8, 0.5};
    auto sv = chain_propagate(FockChainState::all_excited(8, 10), m, ChainDirection::forward);
    EXPECT_NEAR(sv.mean_photons(), inverted_emission(m, 10).exact, 1e-12);
}

TEST(Chain, ConvergesWithAtomNumber)
{
    for (double d : {0.5, 2.0}) {
        double prev[4] = {1e9, 1e9, 1e9, 1e9};
        for (std::size_t n : {10u, 50u, 200u}) {
            ChainModel m{n, d};
            double err[4] = {
                std::abs(chain_absorption(m).exact / chain_absorption(m).limit - 1),
                std::abs(chain_efficiency(m, ChainDirection::forward).exact /
                             chain_efficiency(m, ChainDirection::forward).limit - 1),
                std::abs(chain_efficiency(m, ChainDirection::backward).exact /
                             chain_efficiency(m, ChainDirection::backward).limit - 1),
                std::abs(inverted_emission(m, 200).exact / inverted_emission(m, 200).limit - 1)};
            for (int k = 0; k < 4; ++k) {
                EXPECT_LT(err[k], prev[k]) << d << " " << n << " " << k;
                prev[k] = err[k];
            }
        }
    }
}

TEST(Chain, BackwardLimitEqualsHalfCribTransfer)
{
    for (double d : {0.5, 1.0, 3.0}) {
        auto b = chain_efficiency({100, d}, ChainDirection::backward);
        EXPECT_NEAR(tv_criterion(TvProtocol::crib, {d}).value / 2.0, b.limit, 1e-10);
    }
}

TEST(Chain, TruncationOverflowDetected)
{
    try {
        inverted_emission({200, 2.0}, 40);
        FAIL() << "expected TruncationOverflow";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::TruncationOverflow);
    }
}
