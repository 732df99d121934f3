#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "covsense/errors.hpp"
#include "covsense/fock.hpp"
#include "covsense/gaussian.hpp"
#include "covsense/protocol.hpp"
#include "support.hpp"

using namespace covsense;
using covsense::testing::near_rel;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

constexpr ProtocolVariant kAll[] = {ProtocolVariant::Entangled, ProtocolVariant::ClassicalThermal,
                                    ProtocolVariant::CoherentBaseline};

SensingScenario fig3_point() {
  SensingScenario s;
  s.N_S = 8e-4;
  s.N_B = 160.0;
  s.kappa_E = 0.36;
  s.kappa_T = 0.0165 / 0.36;
  return s;
}

}  // namespace

TEST(Protocol, VariantNamesRoundTrip) {
  for (auto v : kAll) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_EQ(parse_variant("classical"), ProtocolVariant::ClassicalThermal);
  EXPECT_EQ(parse_variant("coherent"), ProtocolVariant::CoherentBaseline);
  EXPECT_THROW(parse_variant("squeezed"), InvalidArgument);
}

TEST(Protocol, ScenarioValidation) {
  SensingScenario s;
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.mode_count(), static_cast<std::uint64_t>(std::llround(s.W * s.T)));
  auto bad = [](auto mutate) {
    SensingScenario b;
    mutate(b);
    EXPECT_THROW(b.validate(), InvalidArgument);
  };
  bad([](SensingScenario& b) { b.N_S = -1e-3; });
  bad([](SensingScenario& b) { b.N_B = -1.0; });
  bad([](SensingScenario& b) { b.kappa_T = 0.0; });
  bad([](SensingScenario& b) { b.kappa_E = 1.5; });
  bad([](SensingScenario& b) { b.kappa_I = 0.0; });
  bad([](SensingScenario& b) { b.W = 0.0; });
  bad([](SensingScenario& b) { b.T = -1.0; });
  bad([](SensingScenario& b) { b.G_pc = 0.99; });
  bad([](SensingScenario& b) { b.willie_fraction = 0.0; });
  bad([](SensingScenario& b) { b.W = 1.0; b.T = 0.1; });  // M rounds to 0
}

TEST(Protocol, TmsvStructure) {
  const auto v = tmsv(0.0);
  EXPECT_LT(max_abs(v.cov() - Matrix::Identity(4, 4)), 1e-15);

  const auto p = tmsv(8e-4);
  EXPECT_NEAR(photon_mean(p, kSignal), 8e-4, 1e-15);
  EXPECT_NEAR(photon_mean(p, kIdler), 8e-4, 1e-15);

  const double n = 0.3;
  const auto t = tmsv(n);
  const double c = 2.0 * std::sqrt(n * (n + 1.0));
  EXPECT_NEAR(t.cov()(0, 2), c, 1e-14);
  EXPECT_NEAR(t.cov()(1, 3), -c, 1e-14);
  const Vector nu = symplectic_eigenvalues(t.cov());
  for (Eigen::Index i = 0; i < nu.size(); ++i) EXPECT_NEAR(nu(i), 1.0, 1e-10);
  EXPECT_THROW(tmsv(-0.1), InvalidArgument);
}

TEST(Protocol, TmsvMatchesFockOracle) {
  const auto g = fock::from_gaussian(tmsv(0.25), {40, 40});
  const auto f = fock::tmsv(0.25, 40);
  EXPECT_NEAR(fock::fidelity(g, f), 1.0, 1e-6);
}

TEST(Protocol, SplitThermalStructure) {
  const auto v = split_thermal(0.0);
  EXPECT_LT(max_abs(v.cov() - Matrix::Identity(4, 4)), 1e-15);

  const auto s = split_thermal(1.0);
  const std::vector<ModeLabel> both{std::string(kSignal), std::string(kReference)};
  const auto st = photon_stats(s, both);
  EXPECT_NEAR(st.mean(kSignal), 1.0, 1e-12);
  EXPECT_NEAR(st.mean(kReference), 1.0, 1e-12);
  EXPECT_NEAR(st.variance(kSignal), 2.0, 1e-12);
  EXPECT_NEAR(std::abs(s.cov()(0, 2)), 2.0, 1e-12);
  EXPECT_NEAR(s.cov()(0, 2), s.cov()(1, 3), 1e-12);
  EXPECT_NEAR(s.cov()(0, 3), 0.0, 1e-12);

  // Photon-number covariance from the Fock oracle: a thermal source of mean 2
  // split in half gives cov(n_S, n_R) = N_S^2.
  auto f = fock::tensor(fock::thermal(2.0, 60), fock::vacuum({60}));
  f = fock::apply_beamsplitter(f, 0, 1, 0.5);
  EXPECT_NEAR(st.covariance(kSignal, kReference), fock::photon_covariance(f, 0, 1), 1e-5);
  EXPECT_NEAR(st.covariance(kSignal, kReference), 1.0, 1e-12);

  for (int i = 0; i <= 20; ++i) {
    const double n = 0.5 * i;
    const auto c = split_thermal(n);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(c.cov() - Matrix::Identity(4, 4));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10) << "N_S = " << n;
  }
}

TEST(Protocol, UnequalSplitKeepsSignalEnergy) {
  const auto s = split_thermal(8e-4, 100.0);
  EXPECT_NEAR(photon_mean(s, kSignal), 8e-4, 1e-12);
  EXPECT_NEAR(photon_mean(s, kReference), 100.0, 1e-10);
}

TEST(Protocol, CrossCorrelationDominance) {
  for (double n : {1e-6, 8e-4, 0.1, 1.0, 10.0}) {
    const double q = std::abs(tmsv(n).cov()(0, 2));
    const double c = std::abs(split_thermal(n).cov()(0, 2));
    EXPECT_GT(q, c);
  }
}

TEST(Protocol, IdealPipelineIsIdentity) {
  SensingScenario s;
  s.N_S = 0.3;
  s.N_B = 0.0;
  s.kappa_T = 1.0;
  s.kappa_E = 1.0;
  s.kappa_I = 1.0;
  s.theta = 0.0;
  for (auto v : kAll) {
    const auto src = source_state(s, v);
    const auto out = build_receiver_input(s, v);
    EXPECT_LT(max_abs(out.cov() - src.cov()), 1e-14) << to_string(v);
    EXPECT_LT((out.mean() - src.mean()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Protocol, ReceiverInputAtFig3Point) {
  const auto s = fig3_point();
  const auto in = build_receiver_input(s, ProtocolVariant::Entangled);
  EXPECT_TRUE(near_rel(photon_mean(in, kSignal), 0.0165 * 8e-4 + 160.0, 1e-14));

  s.validate();
  const double cross = std::hypot(in.cov()(0, 2), in.cov()(1, 2));
  const double expected = 2.0 * std::sqrt(s.kappa() * s.kappa_I * s.N_S * (s.N_S + 1.0));
  EXPECT_TRUE(near_rel(cross, expected, 1e-12));
  EXPECT_EQ(build_receiver_input(s, ProtocolVariant::CoherentBaseline).num_modes(), 1u);
}

TEST(Protocol, ReceiverInputCrossBlockMatchesOracle) {
  auto s = covsense::testing::desk_scenario(0.2, 0.5, 0.4, 0.8, 1.1, 0.0);
  const auto g = build_receiver_input(s, ProtocolVariant::Entangled);
  auto f = fock::tmsv(0.2, 30);
  f = fock::apply_thermal_loss(f, 0, s.kappa(), s.N_B, 40);
  f = fock::apply_thermal_loss(f, 1, s.kappa_I, 0.0);
  const auto fg = fock::from_gaussian(g, {40, 30});
  EXPECT_NEAR(fock::fidelity(f, fg), 1.0, 1e-6);
}

TEST(Protocol, PhaseIsTwoPiPeriodic) {
  auto s = fig3_point();
  for (auto v : kAll) {
    s.theta = 0.7;
    const auto a = build_receiver_input(s, v);
    s.theta = 0.7 + 2.0 * std::numbers::pi;
    const auto b = build_receiver_input(s, v);
    EXPECT_LT(max_abs(a.cov() - b.cov()), 1e-12);
    EXPECT_LT((a.mean() - b.mean()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Protocol, TransmitterLossCommutesWithPhase) {
  SensingScenario s = fig3_point();
  s.theta = 1.1;
  // Loss first (the pipeline) versus phase first on the source.
  auto a = tmsv(s.N_S);
  a = apply_thermal_loss(a, kSignal, s.kappa_T, 0.0);
  a = apply_phase(a, kSignal, s.theta);
  auto b = tmsv(s.N_S);
  b = apply_phase(b, kSignal, s.theta);
  b = apply_thermal_loss(b, kSignal, s.kappa_T, 0.0);
  EXPECT_LT(max_abs(a.cov() - b.cov()), 1e-14);
}

TEST(Protocol, ProbeEnergyParity) {
  const auto s = fig3_point();
  for (auto v : kAll) {
    auto src = source_state(s, v);
    src = apply_thermal_loss(src, kSignal, s.kappa_T, 0.0);
    EXPECT_TRUE(near_rel(photon_mean(src, kSignal), s.kappa_T * s.N_S, 1e-10)) << to_string(v);
  }
}

TEST(Protocol, WillieMarginal) {
  SensingScenario s;
  s.N_S = 0.0;
  s.N_B = 3.0;
  EXPECT_NEAR(photon_mean(willie_marginal(s, ProtocolVariant::Entangled, true), kWillie), 3.0,
              1e-14);

  s = fig3_point();
  const double n1e = photon_mean(willie_marginal(s, ProtocolVariant::Entangled, true), kWillie);
  const double n1c =
      photon_mean(willie_marginal(s, ProtocolVariant::ClassicalThermal, true), kWillie);
  EXPECT_DOUBLE_EQ(n1e, n1c);
  EXPECT_NEAR(photon_mean(willie_marginal(s, ProtocolVariant::Entangled, false), kWillie), 160.0,
              1e-12);

  SensingScenario d;
  d.willie_fraction = 1.0;
  d.kappa_E = 0.5;
  d.kappa_T = 1.0;
  d.N_S = 0.4;
  d.N_B = 2.0;
  const auto w = willie_marginal(d, ProtocolVariant::Entangled, true);
  EXPECT_NEAR(photon_mean(w, kWillie), 2.2, 1e-14);
  EXPECT_NEAR(w.cov()(0, 1), 0.0, 0.0);
  EXPECT_NEAR(w.cov()(0, 0), w.cov()(1, 1), 1e-14);
  EXPECT_NEAR(willie_signal_photons(d), 0.2, 1e-15);

  // The Fock marginal of the environment port: a beamsplitter of transmissivity
  // kappa_E on the thermal signal arm leaves (1 - kappa_E) N_S at the tap.
  auto f = fock::tensor(fock::thermal(0.4, 40), fock::vacuum({40}));
  f = fock::apply_beamsplitter(f, 0, 1, 0.5);
  EXPECT_NEAR(fock::photon_mean(f, 1), 0.2, 1e-9);

  // Coherent probe: displaced, same energy.
  const auto wc = willie_marginal(d, ProtocolVariant::CoherentBaseline, true);
  EXPECT_NEAR(photon_mean(wc, kWillie), 2.2, 1e-14);
  EXPECT_GT(wc.mean().norm(), 0.0);
}
