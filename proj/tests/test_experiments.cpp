#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "covsense/errors.hpp"
#include "covsense/experiments.hpp"
#include "covsense/montecarlo.hpp"
#include "support.hpp"

using namespace covsense;
using covsense::testing::near_rel;

namespace {

std::string render(const ExperimentOutput& out, const RunConfig& cfg) {
  std::ostringstream os;
  write_output(os, out, cfg);
  return os.str();
}

std::vector<std::size_t> rows_where(const Table& t, const std::string& column,
                                    const std::string& value) {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.text(i, column) == value) r.push_back(i);
  }
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(Config, DefaultsValidate) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.shots(), 2000u);
  EXPECT_EQ(cfg.seed(), 1u);
  EXPECT_EQ(cfg.scenario(), SensingScenario{});
  EXPECT_EQ(cfg.format(), "csv");
}

TEST(Config, AssignmentsAndPrecedence) {
  const auto dir = std::filesystem::temp_directory_path() / "covsense_config_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "run.json";
  {
    std::ofstream f(path);
    f << "{\n  // file layer\n  \"seed\": 5, \"scenario\": {\"N_B\": 40}, \"shots\": 300\n}\n";
  }
  RunConfig cfg;
  cfg.merge_file(path.string());
  EXPECT_EQ(cfg.seed(), 5u);
  EXPECT_EQ(cfg.scenario().N_B, 40.0);
  cfg.set("seed=9");
  cfg.set("scenario.theta=0.5");
  cfg.set("format=json");
  cfg.set("fig3.variants=[\"coherent\"]");
  EXPECT_EQ(cfg.seed(), 9u);
  EXPECT_EQ(cfg.shots(), 300u);
  EXPECT_EQ(cfg.scenario().theta, 0.5);
  EXPECT_EQ(cfg.format(), "json");
  EXPECT_EQ(cfg.at("fig3.variants").size(), 1u);
  std::filesystem::remove_all(dir);
}

TEST(Config, RejectsBadInput) {
  RunConfig cfg;
  EXPECT_THROW(cfg.set("scenario.bogus=1"), ConfigError);
  EXPECT_THROW(cfg.set("nosuch=1"), ConfigError);
  EXPECT_THROW(cfg.set("shots=\"many\""), ConfigError);
  EXPECT_THROW(cfg.set("missing_equals"), ConfigError);
  EXPECT_THROW(cfg.merge_file("/nonexistent/covsense.json"), ConfigError);

  auto invalid = [](const char* assignment) {
    RunConfig c;
    c.set(assignment);
    EXPECT_THROW(c.validate(), ConfigError) << assignment;
  };
  invalid("scenario.kappa_E=0");
  invalid("scenario.N_S=-1");
  invalid("shots=1");
  invalid("format=\"xml\"");
  invalid("fig3.theta_max=4");
  invalid("fig3.variants=[\"squeezed\"]");
  invalid("fig4.N_B_grid=[-1]");
  invalid("fig5.T_grid=[0]");
  invalid("grid.param=\"colour\"");
  invalid("jobs=0");
}

TEST(Config, Grids) {
  const auto g = geometric_grid(1e-3, 64e-3, 7);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-3);
  EXPECT_NEAR(g.back(), 64e-3, 1e-17);
  EXPECT_NEAR(g[1] / g[0], 2.0, 1e-12);
  const auto l = linear_grid(0.0, 1.0, 5);
  EXPECT_DOUBLE_EQ(l[2], 0.5);
}

TEST(Experiments, UnknownCommand) {
  EXPECT_THROW(run_command("fig9", RunConfig{}), ConfigError);
  EXPECT_EQ(command_names().size(), 6u);
}

TEST(Experiments, Fig3NoiseFreeRecoversTheta) {
  RunConfig cfg;
  cfg.set("fig3.theta_grid", ConfigTree::array({0.0, std::numbers::pi / 2, std::numbers::pi}));
  cfg.set("fig3.noise_free=true");
  cfg.set("shots=10");
  const auto out = run_command("fig3", cfg);
  EXPECT_TRUE(out.failures.empty());
  ASSERT_EQ(out.table.rows.size(), 6u);
  for (std::size_t i = 0; i < out.table.rows.size(); ++i) {
    EXPECT_NEAR(out.table.number(i, "theta_mean"), out.table.number(i, "theta"), 1e-7);
    EXPECT_NEAR(out.table.number(i, "mse_theta"), 0.0, 1e-14);
  }
}

TEST(Experiments, Fig3DefaultAdvantage) {
  const RunConfig cfg;
  const auto out = run_command("fig3", cfg);
  const auto& t = out.table;
  const auto e = rows_where(t, "variant", "entangled");
  const auto c = rows_where(t, "variant", "classical");
  ASSERT_EQ(e.size(), 13u);
  ASSERT_EQ(c.size(), 13u);
  double se = 0.0, sc = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_DOUBLE_EQ(t.number(e[i], "theta"), t.number(c[i], "theta"));
    se += t.number(e[i], "rms_cos");
    sc += t.number(c[i], "rms_cos");
  }
  EXPECT_LT(se, sc);
}

TEST(Experiments, Fig4Regimes) {
  RunConfig cfg;
  cfg.set("shots=500");
  const auto out = run_command("fig4", cfg);
  ASSERT_TRUE(out.failures.empty());
  const auto& t = out.table;
  for (const char* variant : {"entangled", "classical"}) {
    std::vector<std::size_t> cov, pow;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.text(i, "variant") != variant) continue;
      (t.text(i, "regime") == "fixed_covertness" ? cov : pow).push_back(i);
    }
    ASSERT_EQ(cov.size(), 6u);
    ASSERT_EQ(pow.size(), 6u);
    for (std::size_t i : cov) {
      EXPECT_TRUE(near_rel(t.number(i, "epsilon"), 2e-4, 0.02));
      EXPECT_GE(t.number(i, "theory_mse"), t.number(i, "qcrb") * (1.0 - 1e-5));
    }
    for (std::size_t k = 1; k < pow.size(); ++k) {
      EXPECT_LT(t.number(pow[k], "epsilon"), t.number(pow[k - 1], "epsilon"));
      EXPECT_GT(t.number(pow[k], "theory_mse"), t.number(pow[k - 1], "theory_mse"));
    }
    // eps ~ 1 / sqrt(N_B (N_B + 1)) at fixed power.
    EXPECT_TRUE(near_rel(t.number(pow[0], "epsilon") / t.number(pow[5], "epsilon"),
                         std::sqrt(1280.0 * 1281.0 / (40.0 * 41.0)), 1e-3));
  }
}

TEST(Experiments, Fig5Schedules) {
  RunConfig cfg;
  cfg.set("shots=500");
  const auto out = run_command("fig5", cfg);
  ASSERT_TRUE(out.failures.empty());
  const auto& t = out.table;
  for (const char* variant : {"entangled", "classical"}) {
    std::map<std::string, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.text(i, "variant") == variant) by[t.text(i, "schedule")].push_back(i);
    }
    const auto& obey = by["obey"];
    const auto& violate = by["violate"];
    ASSERT_EQ(obey.size(), 6u);
    ASSERT_EQ(violate.size(), 6u);
    std::vector<double> ts, mo, mv;
    for (std::size_t k = 0; k < 6; ++k) {
      EXPECT_TRUE(near_rel(t.number(obey[k], "pe_exact"), t.number(obey[0], "pe_exact"), 0.02));
      EXPECT_LE(t.number(obey[k], "pe_lower"), t.number(obey[k], "pe_exact"));
      if (k > 0) {
        EXPECT_LT(t.number(violate[k], "pe_exact"), t.number(violate[k - 1], "pe_exact"));
      }
      ts.push_back(t.number(obey[k], "T"));
      mo.push_back(t.number(obey[k], "theory_mse"));
      mv.push_back(t.number(violate[k], "theory_mse"));
    }
    EXPECT_NEAR(loglog_slope(ts, mo), -0.5, 0.05) << variant;
    EXPECT_NEAR(loglog_slope(ts, mv), -1.0, 0.05) << variant;
  }
}

TEST(Experiments, QcrbZeroProbeRow) {
  RunConfig cfg;
  cfg.set("grid.param=\"N_S\"");
  cfg.set("grid.values=[0, 8e-4]");
  cfg.set("grid.variants=[\"entangled\"]");
  const auto out = run_command("qcrb", cfg);
  ASSERT_EQ(out.table.rows.size(), 2u);
  EXPECT_EQ(out.table.number(0, "J"), 0.0);
  EXPECT_GT(out.table.number(1, "J"), 0.0);
  EXPECT_GE(out.table.number(1, "efficiency"), 0.8);
}

TEST(Experiments, CovertnessLadder) {
  RunConfig cfg;
  cfg.set("grid.param=\"N_S\"");
  cfg.set("grid.values=[1e-5, 1e-4, 1e-3, 1e-2, 0.1]");
  const auto out = run_command("covertness", cfg);
  const auto& t = out.table;
  ASSERT_EQ(t.rows.size(), 15u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.text(i, "variant") == "coherent") continue;
    EXPECT_LE(t.number(i, "pe_lower"), t.number(i, "pe_exact"));
    EXPECT_LE(t.number(i, "pe_exact"), 0.5);
  }
}

TEST(Experiments, SweepSingletonEqualsSimulate) {
  RunConfig cfg;
  cfg.set("grid.variants=[\"entangled\"]");
  cfg.set("shots=400");
  cfg.set("seed=12");
  const auto out = run_command("sweep", cfg);
  ASSERT_EQ(out.table.rows.size(), 1u);
  const auto r = simulate(cfg.scenario(), ProtocolVariant::Entangled, 400, 12);
  EXPECT_EQ(out.table.number(0, "mse_theta"), r.mse_theta);
  EXPECT_EQ(out.table.number(0, "qcrb"), r.qcrb);
}

TEST(Experiments, SweepReportsFailedPoints) {
  RunConfig cfg;
  cfg.set("grid.param=\"N_S\"");
  cfg.set("grid.values=[0, 8e-4]");
  cfg.set("grid.variants=[\"entangled\"]");
  cfg.set("shots=100");
  const auto out = run_command("sweep", cfg);
  EXPECT_EQ(out.table.rows.size(), 1u);
  EXPECT_EQ(out.failures.size(), 1u);
}

TEST(Experiments, OutputIsSelfDescribingAndDeterministic) {
  RunConfig cfg;
  cfg.set("shots=300");
  cfg.set("seed=3");
  cfg.set("jobs=1");
  const auto a = render(run_command("fig3", cfg), cfg);
  cfg.set("jobs=4");
  const auto b = render(run_command("fig3", cfg), cfg);
  // The header echoes jobs, so compare data rows only across job counts.
  auto data = [](const std::string& s) { return s.substr(s.find("\nvariant,")); };
  EXPECT_EQ(data(a), data(b));
  EXPECT_EQ(b, render(run_command("fig3", cfg), cfg));
  EXPECT_EQ(a.rfind("# ", 0), 0u);
  EXPECT_NE(a.find("\"seed\":3"), std::string::npos);
  EXPECT_NE(a.find(version_string()), std::string::npos);

  cfg.set("format=\"json\"");
  const auto j = nlohmann::json::parse(render(run_command("qcrb", cfg), cfg));
  EXPECT_EQ(j["command"], "qcrb");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_TRUE(j["config"].contains("scenario"));
  EXPECT_FALSE(j["rows"].empty());
}
