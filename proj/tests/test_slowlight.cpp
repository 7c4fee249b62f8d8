#include <gtest/gtest.h>

#include <qmem/slowlight/protocols.hpp>

using namespace qmem;

TEST(SlowLight, FidReferenceMatchesTransfer)
{
    auto s = fid_scenario();
    s.extra_time = 20.0;
    auto r = run_slowlight(s);
    auto tf = apply_transfer(r.input, reference_transfer(s));
    EXPECT_NEAR(r.reference_energy / (tf.energy() / r.input.energy()), 1.0, 0.01);
}

TEST(SlowLight, EitReplicaSuppressedRelativeToShome)
{
    auto shome = run_slowlight(shome_scenario());
    auto eit = run_slowlight(eit_scenario());
    EXPECT_GT(shome.replica_energy, 0.05);
    EXPECT_LE(eit.replica_energy, 0.1 * shome.replica_energy);
    EXPECT_NEAR(shome.numeric, 0.36, 0.04);
}

TEST(SlowLight, RetrievalInvariantUnderLongerStorage)
{
    for (auto s : {fid_scenario(), eit_scenario()}) {
        auto a = run_slowlight(s);
        s.retrieval = s.storage + 2.0 * (s.retrieval - s.storage);
        auto b = run_slowlight(s);
        EXPECT_NEAR(b.numeric / a.numeric, 1.0, 0.01) << to_string(s.protocol);
    }
}

TEST(SlowLight, ShorterSignalDoesNotHelp)
{
    auto base = fid_scenario();
    double prev = 1.0;
    for (double w : {0.05, 0.025, 0.0125}) {
        auto s = base;
        s.signal = gaussian_pulse(0.0, w, pi / 20.0);
        s.pi_width = std::min(base.pi_width, w / 10.0);
        double eff = run_slowlight(s).numeric;
        EXPECT_LE(eff, prev) << w;
        prev = eff;
    }
}

TEST(SlowLight, RisingExponentialBeatsGaussianForFid)
{
    auto s = fid_scenario();
    double gauss = run_slowlight(s).numeric;
    // intensity time constant 1/(d Gamma), ending as the storage pulse arrives
    double tc = 2.0 / (s.d * s.gamma);
    s.signal = rising_exponential_pulse(s.storage - 0.5 * s.pi_width, tc, pi / 20.0);
    EXPECT_GE(run_slowlight(s).numeric, gauss);
}

TEST(SlowLight, Warnings)
{
    auto r = raman_scenario();
    EXPECT_TRUE(r.validate().empty());
    r.big_delta = 50.0;
    ASSERT_FALSE(r.validate().empty());
    EXPECT_EQ(r.validate()[0].kind, ErrorKind::RamanConditionViolated);
    auto f = fid_scenario();
    f.pi_width = 0.04;
    ASSERT_FALSE(f.validate().empty());
    EXPECT_EQ(f.validate()[0].kind, ErrorKind::RegimeWarning);
    f = fid_scenario();
    f.retrieval = 0.01;
    EXPECT_THROW(f.validate(), Error);
}
