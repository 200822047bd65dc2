#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinfactor/experiments/commands.hpp"
#include "spinfactor/experiments/config.hpp"
#include "spinfactor/experiments/output.hpp"
#include "spinfactor/experiments/stats.hpp"

using namespace spinfactor;
using namespace spinfactor::experiments;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("spinfactor_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CommandResult run(const json& j, const std::string& name) {
  return run_command(config_from_json(j), scratch(name));
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("config overlay and validation") {
    const auto c = config_from_json({{"command", "factorize"}, {"runs", 10}, {"model", {{"alpha", 0.5}}}});
    CHECK(c.runs == 10);
    CHECK(c.model.alpha == 0.5);
    CHECK(c.model.r == default_config("factorize").model.r);
    CHECK(c.effective_beta() == doctest::Approx(7.0 / 6.0));

    CHECK_THROWS_AS(config_from_json({{"command", "synth"}, {"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"command", "synth"}, {"model", {{"bogus", 1}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"command", "nope"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"command", "synth"}, {"runs", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"command", "synth"}, {"runs", "many"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"runs", 3}}), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("config round trip and hash") {
    for (const auto& name : command_names()) {
      const auto c = default_config(name);
      const auto back = config_from_json(c.to_json());
      CHECK(back.to_json() == c.to_json());
      CHECK(config_hash(back) == config_hash(c));
      CHECK(config_hash(c).size() == 16);
    }
    auto a = default_config("mu-hist");
    auto b = a;
    b.workers = 8;
    CHECK(config_hash(a) == config_hash(b));
    b.master_seed += 1;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("grids") {
    const auto g = Grid::from_json({{"start", -1.0}, {"stop", 1.0}, {"num", 21}}, "b1");
    REQUIRE(g.values.size() == 21);
    CHECK(g.values[7] == -0.3);
    CHECK(g.values[10] == 0.0);
    CHECK(Grid::from_json(json::array({0.5, 1.5}), "x").values == std::vector<double>{0.5, 1.5});
    CHECK_THROWS_AS(Grid::from_json("x", "x"), ConfigError);
  }

  TEST_CASE("chi-square") {
    const std::vector<std::size_t> flat(16, 10);
    CHECK(chi_square_uniform(flat, 160) == 0.0);
    const std::vector<std::size_t> skew{30, 10};
    CHECK(chi_square_uniform(skew, 40) == doctest::Approx(10.0));
    // 10 samples outside the bins: expected 25 each
    const std::vector<std::size_t> short_bins{20, 20};
    CHECK(chi_square_uniform(short_bins, 50) == doctest::Approx(2.0));
  }

  TEST_CASE("isotonic fit") {
    const std::vector<double> v{0.5, 0.3, 0.4, 0.1, 0.0};
    const auto fit = isotonic_non_increasing(v);
    CHECK(fit == std::vector<double>{0.5, 0.35, 0.35, 0.1, 0.0});
    for (std::size_t i = 1; i < fit.size(); ++i) CHECK(fit[i] <= fit[i - 1]);
    const std::vector<double> ok{0.5, 0.45, 0.2, 0.0, 0.01, 0.0};
    CHECK(non_increasing_within_noise(ok, 100));
    const std::vector<double> bad{0.0, 0.0, 0.5, 0.0};
    CHECK_FALSE(non_increasing_within_noise(bad, 100));
  }

  TEST_CASE("gray zone and crossing") {
    const std::vector<double> xs{0.0, 1.0, 2.0};
    const std::vector<std::vector<double>> sharp{{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    // max(p) < 0.9 for t in (0.1, 0.9) of the second interval
    CHECK(gray_zone_width(xs, sharp) == doctest::Approx(0.8).epsilon(1e-3));
    const std::vector<std::vector<double>> clean{{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
    CHECK(gray_zone_width(xs, clean) == 0.0);

    const std::vector<double> p{1.0, 0.8, 0.2};
    CHECK(crossing_point(xs, p) == doctest::Approx(1.5));
    const std::vector<double> never{1.0, 0.9, 0.8};
    CHECK(std::isnan(crossing_point(xs, never)));
  }

  TEST_CASE("csv rendering") {
    CsvTable t({"a", "b"});
    t.add_row({"1", "0.5"});
    CHECK_THROWS(t.add_row({"1"}));
    CHECK(t.render({{"k", "v"}}) == "a,b\n1,0.5\n# k=v\n");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(std::size_t{42}) == "42");
  }

  TEST_CASE("synth command") {
    const auto r = run({{"command", "synth"}}, "synth");
    CHECK(r.exit_code == kExitOk);
    CHECK(r.summary.at("status") == "pass");
    CHECK(r.summary.at("ground_state_count") == 16);
    for (const auto& f : r.files) CHECK(fs::exists(f));

    const auto bad = run({{"command", "synth"}, {"model", {{"gap_target", 10.0}, {"coeff_bound", 1.0}}}},
                         "synth_bad");
    CHECK(bad.exit_code == kExitVerificationFailure);
    CHECK(bad.summary.at("status") == "infeasible");
  }

  TEST_CASE("oracle command") {
    const auto mu = run({{"command", "oracle"}}, "oracle_mu");
    CHECK(mu.summary.at("count") == 16);
    const auto cq = run({{"command", "oracle"}, {"oracle", {{"target", "cq-triple"}}}}, "oracle_cq");
    CHECK(cq.summary.at("configs") == json::array({"111"}));
    CHECK_THROWS_AS(run({{"command", "oracle"}, {"oracle", {{"target", "circuit"}}}}, "oracle_bad"),
                    ConfigError);
  }

  TEST_CASE("mu-hist command") {
    const auto clean = run({{"command", "mu-hist"}}, "mu_hist");
    CHECK(clean.summary.at("nonzero_bins") == 16);
    CHECK(clean.summary.at("chi_square").get<double>() >= 0.0);
    const auto biased =
        run({{"command", "mu-hist"}, {"runs", 2000}, {"disorder", {{"delta", 0.5}, {"seed", 3}}}},
            "mu_hist_biased");
    CHECK(biased.summary.at("nonzero_bins").get<int>() < 16);
  }

  TEST_CASE("cq-sweep command") {
    const auto r = run({{"command", "cq-sweep"}, {"grids", {{"r", {0.0, 0.25}}}}}, "cq_sweep");
    const auto& pts = r.summary.at("points");
    REQUIRE(pts.size() == 2);
    CHECK(std::abs(pts[0].at("error_rate").get<double>() - 0.5) <= 3.0 * 0.05);
    CHECK(pts[1].at("errors") == 0);
  }

  TEST_CASE("phase corner and line saturation") {
    const auto pd = run({{"command", "phase-diagram"},
                         {"runs", 200},
                         {"grids", {{"b1", {-1.0, 1.0}}, {"b2", {-1.0, 1.0}}}}},
                        "phase_small");
    bool checked = false;
    for (const auto& c : pd.summary.at("corners"))
      if (c.at("b1") == -1.0 && c.at("b2") == -1.0) {
        CHECK(c.at("dominant") == "11");
        CHECK(c.at("probability").get<double>() >= 0.99);
        checked = true;
      }
    CHECK(checked);
    CHECK(pd.summary.at("corners_match_oracle") == true);

    const auto ls = run({{"command", "line-scan"}, {"runs", 200}}, "line_scan");
    CHECK(ls.summary.at("initial_state") != ls.summary.at("final_state"));
    const auto again = run({{"command", "line-scan"}, {"runs", 200}}, "line_scan_again");
    CHECK(slurp(ls.files.front()) == slurp(again.files.front()));
  }

  TEST_CASE("factorize without clamp is at chance") {
    const auto r = run({{"command", "factorize"},
                        {"runs", 400},
                        {"schedule", {{"sweeps", 1000}}},
                        {"model", {{"alpha", 0.0}, {"beta", 7.0 / 6.0}}},
                        {"grids", {{"alpha", {0.0}}}}},
                       "factorize_alpha0");
    for (const auto& p : r.summary.at("points")) {
      const unsigned P = p.at("P");
      double chance = 0.0;
      for (unsigned m = 0; m < 4; ++m)
        for (unsigned n = 0; n < 4; ++n) chance += (m * n == P) ? 1.0 / 16.0 : 0.0;
      CHECK_MESSAGE(std::abs(p.at("success_rate").get<double>() - chance) <= 0.1, "P=" << P);
    }
  }

  TEST_CASE("calibrate without disorder changes nothing") {
    const auto r = run({{"command", "calibrate"}, {"disorder", {{"delta", 0.0}}}}, "calibrate_zero");
    const auto& res = r.summary.at("results").at(0);
    for (double v : res.at("corrections").get<std::vector<double>>()) CHECK(std::abs(v) <= 0.05);
    CHECK(res.at("improvement").get<double>() == doctest::Approx(1.0).epsilon(0.5));
  }

  TEST_CASE("calibrate recovers injected offsets") {
    const auto r = run({{"command", "calibrate"},
                        {"disorder", {{"delta", 0.2}, {"seed", 3}}},
                        {"calibration", {{"include_injected_negatives", true}}}},
                       "calibrate_negatives");
    const auto& res = r.summary.at("results").at(0);
    for (double v : res.at("residual").get<std::vector<double>>()) CHECK(std::abs(v) <= 0.02);
    CHECK(res.at("chi_square_after").get<double>() < 37.70);
    CHECK(res.at("chi_square_before").get<double>() > 10.0 * 37.70);
  }
}
