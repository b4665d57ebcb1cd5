#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mrt/config.hpp"
#include "mrt/scenario.hpp"

using namespace mrt;

namespace {

config::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return config::parse(in, MRT_TEST_DATA);
}

std::string run(const config::RunConfig& c) {
  std::ostringstream os;
  scenario::run(c, os);
  return os.str();
}

// Data lines only: comments dropped.
std::vector<std::string> rows(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

const char* scan_text = R"(scenario = mrt-scan
[system]
delta = 0.01
temperature = 0.5
W = 1.0
[bias]
start = -2
stop = 2
steps = 4
)";

}  // namespace

TEST(Config, ParsesScan) {
  const auto c = parse(scan_text);
  EXPECT_EQ(c.scenario, config::Scenario::mrt_scan);
  EXPECT_EQ(c.units, "natural");
  EXPECT_DOUBLE_EQ(c.system.delta.initial, 0.01);
  ASSERT_TRUE(c.bias);
  EXPECT_EQ(c.bias->size(), 5u);
  EXPECT_DOUBLE_EQ((*c.bias)[4], 2.0);
  EXPECT_FALSE(c.spectrum);
  EXPECT_DOUBLE_EQ(*c.W_override, 1.0);
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(parse("scenario = peak\ncolour = red\n"), config_error);
  EXPECT_THROW(parse("scenario = peak\n[system]\ndelat = 0.1\n"), config_error);
  EXPECT_THROW(parse("scenario = peak\n[nope]\nx = 1\n"), config_error);
  EXPECT_THROW(parse("scenario = nope\n"), config_error);
}

TEST(Config, RejectsMalformedNumbers) {
  for (const char* v : {"abc", "1.0x", "", "1e999"}) {
    try {
      parse(std::string("scenario = peak\n[system]\ndelta = ") + v + "\n");
      ADD_FAILURE() << "accepted '" << v << "'";
    } catch (const config_error& e) {
      EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos) << e.what();
    }
  }
  EXPECT_THROW(parse("scenario = peak\nseed = -3\n"), config_error);
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
  try {
    parse("scenario = peak\n\n[system\n");
    FAIL();
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, GridInvariants) {
  EXPECT_THROW(parse("scenario = evolve\n[time]\nstart = 0\nstop = 1\nsteps = 0\n"), config_error);
  EXPECT_THROW(parse("scenario = evolve\n[time]\nstart = 1\nstop = 1\nsteps = 5\n"), config_error);
  EXPECT_THROW(parse("scenario = evolve\n[time]\nstart = 0\nstop = 1\nsteps = 2000000\n"), config_error);
  EXPECT_THROW(parse("scenario = evolve\n[time]\nstart = 0\nstop = 1\n"), config_error);
}

TEST(Config, EnumeratedValues) {
  EXPECT_THROW(parse("scenario = evolve\n[evolve]\nmode = sideways\n"), config_error);
  EXPECT_EQ(parse("scenario = evolve\n[evolve]\nmode = short-time\n").mode, config::EvolveMode::short_time);
  EXPECT_EQ(parse("scenario = oracle\n[oracle]\nname = refined-nonlocal\n").oracle,
            config::OracleName::refined_nonlocal);
  EXPECT_EQ(parse("scenario = mrt-scan\n[scan]\nshape = voigt\ngamma = 0.3\n").shape, LineShape::voigt);
}

TEST(Config, SpectrumModels) {
  const auto o = parse("scenario = envelope\n[spectrum]\nmodel = ohmic\neta = 2\ncutoff = 0.5\ntemperature = 1\n");
  ASSERT_TRUE(o.spectrum);
  EXPECT_TRUE(o.spectrum->as<OhmicCutoff>());
  EXPECT_TRUE(parse("scenario = envelope\n[spectrum]\nmodel = white\ns0 = 0.1\n").spectrum->is_white());
  EXPECT_THROW(parse("scenario = envelope\n[spectrum]\nmodel = ohmic\neta = -1\ncutoff = 1\ntemperature = 1\n"),
               config_error);
  EXPECT_THROW(parse("scenario = envelope\n[spectrum]\nmodel = tabulated\nfile = missing.dat\n"), config_error);
}

TEST(Config, LevelsNeedMatchingLengths) {
  const auto c = parse("scenario = multichannel\n[levels]\nenergies = 0, 1\ndeltas = 0.01, 0.2\n");
  ASSERT_TRUE(c.levels);
  EXPECT_EQ(c.levels->size(), 2u);
  EXPECT_THROW(parse("scenario = multichannel\n[levels]\nenergies = 0, 1\ndeltas = 0.01\n"), config_error);
  EXPECT_THROW(parse("scenario = multichannel\n[levels]\nenergies = 0, x\ndeltas = 0.01, 1\n"), config_error);
}

TEST(Config, EchoRoundTrip) {
  auto c = parse(scan_text);
  config::set_seed(c, 42);
  std::string text;
  for (const auto& line : config::echo(c)) text += line + "\n";
  const auto again = parse(text);
  EXPECT_EQ(again.seed, 42u);
  EXPECT_EQ(run(again), run(c));
}

TEST(Scenario, ScanMatchesRateFunctions) {
  const auto c = parse(scan_text);
  const auto r = rows(run(c));
  ASSERT_EQ(r.size(), 6u);
  EXPECT_EQ(r[0], "eps,gamma_minus,gamma_plus,shape");
  const double ep = 1.0 / (2 * 0.5);
  EXPECT_EQ(r[3], "0," + csv::format(gaussian_rate(0.01, 0.0, 1.0, ep, Direction::minus)) + "," +
                      csv::format(gaussian_rate(0.01, 0.0, 1.0, ep, Direction::plus)) + ",gaussian");
}

TEST(Scenario, PreludeEchoesConfigAndVersion) {
  const auto out = run(parse(scan_text));
  EXPECT_EQ(out.rfind("# mrt 1.0.0 scenario=mrt-scan units=natural\n", 0), 0u);
  EXPECT_NE(out.find("# cfg scenario=mrt-scan\n"), std::string::npos);
  EXPECT_NE(out.find("# cfg delta=0.01\n"), std::string::npos);
}

TEST(Scenario, MissingSectionsAreConfigErrors) {
  EXPECT_THROW(run(parse("scenario = mrt-scan\n[system]\ndelta = 0.01\nW = 1\n")), config_error);
  EXPECT_THROW(run(parse("scenario = evolve\n[time]\nstart = 0\nstop = 1\nsteps = 2\n")), config_error);
  EXPECT_THROW(run(parse("scenario = peak\n[system]\ndelta = 0.01\ntemperature = 1\n")), config_error);
  EXPECT_THROW(run(parse("scenario = multichannel\n[system]\ntemperature = 1\nW = 1\n")), config_error);
}

TEST(Scenario, StrongCouplingWarns) {
  std::ostringstream os;
  const auto o = scenario::run(parse(std::string(scan_text) + "\n"), os);
  EXPECT_TRUE(o.warnings.empty());
  auto c = parse("scenario = mrt-scan\n[system]\ndelta = 0.5\ntemperature = 1\nW = 1\n[bias]\nstart = 0\nstop = 1\nsteps = 1\n");
  std::ostringstream os2;
  const auto o2 = scenario::run(c, os2);
  ASSERT_EQ(o2.warnings.size(), 1u);
  EXPECT_NE(os2.str().find("# warning: W/Delta < 10, perturbative regime violated\n"), std::string::npos);
  EXPECT_EQ(o2.status, 0);
}

TEST(Scenario, LocalEvolutionReachesDetailedBalance) {
  const auto c = config::load(std::string(MRT_TEST_DATA) + "/evolve_local.ini");
  const auto r = rows(run(c));
  ASSERT_EQ(r.size(), 202u);
  const double ep = 1.0 / (2 * 0.5);
  const double gm = gaussian_rate(0.02, 0.3, 1.0, ep, Direction::minus);
  const double gp = gaussian_rate(0.02, 0.3, 1.0, ep, Direction::plus);
  const double last = std::stod(r.back().substr(r.back().rfind(',') + 1));
  EXPECT_NEAR(last, gm / (gm + gp), 1e-6);
}

TEST(Scenario, OracleReportPasses) {
  auto c = config::load(std::string(MRT_TEST_DATA) + "/oracle_mc.ini");
  std::ostringstream os;
  EXPECT_EQ(scenario::run(c, os).status, 0);
  auto v = parse("scenario = oracle\n[system]\ndelta = 0.1\nW = 1\n[scan]\neps_p = 0.5\n"
                 "[oracle]\nname = convolution\ngamma = 0.2\n[bias]\nstart = -3\nstop = 3\nsteps = 12\n");
  std::ostringstream os2;
  EXPECT_EQ(scenario::run(v, os2).status, 0);
  EXPECT_EQ(rows(os2.str()).size(), 14u);
}

TEST(Scenario, MonteCarloDeterministicPerSeed) {
  auto c = config::load(std::string(MRT_TEST_DATA) + "/oracle_mc.ini");
  const auto a = run(c);
  c.threads = 5;
  EXPECT_EQ(rows(run(c)), rows(a));
  config::set_seed(c, 7);
  EXPECT_NE(rows(run(c)), rows(a));
}

TEST(Config, InlineCommentsAreIgnored) {
  const auto c = parse("scenario = peak   ; the peak scenario\n[system]\ndelta = 0.02 # amplitude\n; full line\n");
  EXPECT_EQ(c.scenario, config::Scenario::peak);
  EXPECT_DOUBLE_EQ(c.system.delta.initial, 0.02);
}
