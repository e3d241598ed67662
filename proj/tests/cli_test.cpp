#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include "spectra/cli.hpp"

namespace spectra::cli {
namespace {

struct ProcessResult {
  int status = -1;
  std::string output;
};

ProcessResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SPECTRA_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  ProcessResult r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

TEST(Config, ParsesKeyValueLinesWithComments) {
  const auto s = parse_config("# header\nV0 = 5\nlambda=0.2   # inline\n\n n_max = 80\n");
  EXPECT_EQ(s.at("V0"), "5");
  EXPECT_EQ(s.at("lambda"), "0.2");
  EXPECT_EQ(s.at("n-max"), "80");
  EXPECT_EQ(s.size(), 3u);
}

TEST(Config, RejectsUnknownKeysAndMalformedLines) {
  EXPECT_THROW(parse_config("colour = blue\n"), config_error);
  EXPECT_THROW(parse_config("V0 5\n"), config_error);
  EXPECT_THROW(parse_config("V0 =\n"), config_error);
  try {
    parse_config("V0 = 1\nfoo = 2\n");
    FAIL();
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/spectra.conf"), config_error);
}

TEST(Config, LaterLayersWin) {
  const Settings file{{"V0", "5"}, {"N", "60"}};
  const Settings flags{{"N", "80"}};
  const auto s = merge({file, flags});
  EXPECT_EQ(s.at("V0"), "5");
  EXPECT_EQ(s.at("N"), "80");
}

TEST(RunSpec, DefaultsAndOverrides) {
  const auto spec = make_run_spec({{"V0", "5"}, {"lambda", "0.2"}, {"gamma", "0.6"}});
  EXPECT_EQ(spec.method, Method::both);
  EXPECT_EQ(spec.aim.n_max, 120);
  EXPECT_EQ(spec.aim.precision.digits(), 64);
  EXPECT_EQ(spec.hdm.N, 100);
  EXPECT_FALSE(spec.mu_given);
  EXPECT_EQ(spec.format, Format::table);

  const auto custom = make_run_spec({{"V0", "5"},
                                     {"lambda", "0.2"},
                                     {"gamma", "0.6"},
                                     {"method", "hdm"},
                                     {"N", "60"},
                                     {"mu", "0.4"},
                                     {"ell", "2"},
                                     {"format", "json"}});
  EXPECT_EQ(custom.hdm.N, 60);
  EXPECT_TRUE(custom.mu_given);
  EXPECT_EQ(custom.hdm.ell, 2);
  EXPECT_EQ(custom.params.ell(), 2);
  EXPECT_EQ(custom.format, Format::json);
}

TEST(RunSpec, ValidationErrors) {
  const Settings base{{"V0", "5"}, {"lambda", "0.2"}, {"gamma", "0.6"}};
  auto with = [&](Settings extra) {
    auto s = base;
    for (auto& [k, v] : extra) s[k] = v;
    return s;
  };
  EXPECT_THROW(make_run_spec({{"V0", "5"}, {"gamma", "0.6"}}), config_error);
  EXPECT_THROW(make_run_spec(with({{"lambda", "-1"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"lambda", "abc"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"method", "hdm"}, {"n-max", "50"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"method", "aim"}, {"N", "50"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"ell", "1"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"digits", "10"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"format", "xml"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"method", "hdm"}, {"N", "0"}})), config_error);
  EXPECT_THROW(make_run_spec(with({{"bogus", "1"}})), config_error);
  try {
    make_run_spec(with({{"lambda", "-1"}}));
  } catch (const config_error& e) {
    EXPECT_STREQ(e.what(), "lambda must be positive");
  }
}

TEST(ExitCodes, MapErrorKinds) {
  EXPECT_EQ(exit_code_for(config_error("x")), validation);
  EXPECT_EQ(exit_code_for(no_convergence("x")), convergence);
  EXPECT_EQ(exit_code_for(series_exhausted("x")), convergence);
  EXPECT_EQ(exit_code_for(not_positive_definite("x")), convergence);
}

TEST(Run, HdmOnlyWithFixedScale) {
  auto spec = make_run_spec(
      {{"V0", "40"}, {"lambda", "0.5"}, {"gamma", "0.6"}, {"method", "hdm"}, {"mu", "2.5"}, {"format", "csv"}});
  const auto outcome = run(spec);
  EXPECT_EQ(outcome.exit_code, ok);
  ASSERT_EQ(outcome.report.levels.size(), 6u);
  EXPECT_NEAR(*outcome.report.levels[0].e_hdm, -4.4170156123, 1e-9);
  EXPECT_EQ(outcome.report.hdm->mu_source, "user");
  EXPECT_FALSE(outcome.report.aim.has_value());
  // Identical specs render identically.
  EXPECT_EQ(render(outcome.report, Format::csv), render(run(spec).report, Format::csv));
}

TEST(Run, OutsideTheInterestingRegimeWarnsButRuns) {
  const auto outcome = run(make_run_spec({{"V0", "5"}, {"lambda", "0.2"}, {"gamma", "1.5"}, {"method", "hdm"}}));
  EXPECT_EQ(outcome.exit_code, ok);
  EXPECT_NE(outcome.report.precheck.find("gamma outside (0,1)"), std::string::npos);
}

TEST(Curves, CsvLayout) {
  const PotentialParams p(5, 0.2, 0.8);
  const auto csv = emit_curves(p, 10, 3, Curve::both);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,V,U");
  std::getline(in, line);
  EXPECT_EQ(line, "0.00000000000E+00,," + format_sig12(eval_U(p, 0.0)));
  std::getline(in, line);
  EXPECT_EQ(line, "5.00000000000E+00," + format_sig12(eval_V(p, 5.0)) + "," + format_sig12(eval_U(p, 5.0)));

  const auto only_v = emit_curves(p, 10, 2, Curve::V);
  EXPECT_NE(only_v.find("1.00000000000E+01," + format_sig12(eval_V(p, 10.0)) + ",\n"), std::string::npos);
  EXPECT_THROW(emit_curves(p, 0, 3, Curve::both), config_error);
  EXPECT_THROW(emit_curves(p, 1, 1, Curve::both), config_error);
  EXPECT_THROW(parse_curve("W"), config_error);
}

TEST(Tables, ImpossibleToleranceFailsAndReportsTheKnownDiscrepancy) {
  TablesOptions opt;
  opt.tolerance = 0.0;
  opt.with_aim = false;
  const auto outcome = reproduce_tables(opt);
  EXPECT_EQ(outcome.exit_code, convergence);
  EXPECT_NE(outcome.text.find("published AIM - HDM at n=1 is -8.58982683000E-04"), std::string::npos) << outcome.text;
  EXPECT_NE(outcome.text.find("not a failure"), std::string::npos);
  EXPECT_EQ(outcome.checks.size(), 27u);
}

TEST(Executable, NegativeLambdaExitsWithValidationCode) {
  const auto r = run_cli("run --V0 5 --lambda -1 --gamma 0.5");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("lambda must be positive"), std::string::npos) << r.output;
}

TEST(Executable, UnknownFlagAndHelp) {
  EXPECT_EQ(run_cli("run --colour blue").status, 2);
  EXPECT_EQ(run_cli("--help").status, 0);
}

TEST(Executable, CurvesToStandardOutput) {
  const auto r = run_cli("curves --V0 5 --lambda 0.2 --gamma 0.8 --r-max 40 --points 5");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output.rfind("r,V,U\n", 0), 0u);
  EXPECT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 6);
}

}  // namespace
}  // namespace spectra::cli
