// spectra: bound-state spectra of the screened 1/r potential with a barrier.
//
//   spectra run --V0 5 --lambda 0.2 --gamma 0.6 [--method aim|hdm|both]
//   spectra tables [--tolerance T]
//   spectra curves --V0 5 --lambda 0.2 --gamma 0.8 --r-max 40 --points 401
//   spectra plateau --V0 20 --lambda 0.5 --gamma 0.6

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spectra/cli.hpp"

namespace {

using spectra::cli::Settings;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw spectra::config_error("cannot open '" + path + "' for writing");
  out << text;
}

// Flags are kept as text so that flags and config-file entries go through the
// same parser.
struct FlagSet {
  explicit FlagSet(CLI::App* a) : app(a) {}

  CLI::App* app;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> storage;

  void add(const std::string& key, const std::string& help) {
    auto* opt = app->add_option("--" + key, storage[key], help);
    options.emplace_back(key, opt);
  }

  [[nodiscard]] Settings given() const {
    Settings s;
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) s[key] = storage.at(key);
    return s;
  }
};

Settings layered(const FlagSet& flags, const std::string& config, const std::vector<std::string>& keys) {
  Settings file;
  if (!config.empty()) file = spectra::cli::load_config(config, keys);
  return spectra::cli::merge({file, flags.given()});
}

double number(const Settings& s, const std::string& key, double fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  return spectra::cli::detail::parse_value<double>(key, it->second);
}

double required(const Settings& s, const std::string& key) {
  if (!s.count(key)) throw spectra::config_error("missing required parameter " + key);
  return number(s, key, 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound-state spectra by asymptotic iteration and J-matrix diagonalization"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Compute a spectrum with one or both engines");
  FlagSet run_flags{run_cmd};
  run_flags.add("V0", "potential strength");
  run_flags.add("lambda", "range parameter (> 0)");
  run_flags.add("gamma", "barrier parameter");
  run_flags.add("ell", "angular momentum (HDM only for ell > 0)");
  run_flags.add("method", "aim, hdm or both (default both)");
  run_flags.add("N", "HDM basis size (default 100)");
  run_flags.add("mu", "HDM scale parameter (default: plateau scan)");
  run_flags.add("n-max", "AIM iteration depth (default 120)");
  run_flags.add("digits", "AIM working precision in decimal digits (default 64)");
  run_flags.add("format", "table, csv or json (default table)");
  run_flags.add("out", "output file (default standard output)");
  std::string run_config;
  run_cmd->add_option("--config", run_config, "key = value file; flags take precedence");

  // tables
  auto* tables_cmd = app.add_subcommand("tables", "Recompute the reference tables and diff them");
  std::optional<double> tolerance;
  spectra::cli::TablesOptions topt;
  std::string tables_method = "both";
  std::string tables_out;
  tables_cmd->add_option("--tolerance", tolerance, "absolute tolerance replacing the per-cell defaults");
  tables_cmd->add_option("--n-max", topt.n_max, "AIM iteration depth")->capture_default_str();
  tables_cmd->add_option("--digits", topt.digits, "AIM precision in decimal digits")->capture_default_str();
  tables_cmd->add_option("--N", topt.N, "HDM basis size")->capture_default_str();
  tables_cmd->add_option("--method", tables_method, "aim, hdm or both")->check(CLI::IsMember({"aim", "hdm", "both"}));
  tables_cmd->add_option("--out", tables_out, "output file");

  // curves
  auto* curves_cmd = app.add_subcommand("curves", "Emit V(r) and U(r) samples as CSV");
  FlagSet curve_flags{curves_cmd};
  curve_flags.add("V0", "potential strength");
  curve_flags.add("lambda", "range parameter (> 0)");
  curve_flags.add("gamma", "barrier parameter");
  curve_flags.add("r-max", "largest radius (default 20/lambda)");
  curve_flags.add("points", "number of samples (default 401)");
  curve_flags.add("which", "V, U or both (default both)");
  curve_flags.add("out", "output file");
  std::string curves_config;
  curves_cmd->add_option("--config", curves_config, "key = value file; flags take precedence");

  // plateau
  auto* plateau_cmd = app.add_subcommand("plateau", "Scan the HDM scale parameter for a plateau of stability");
  FlagSet plateau_flags{plateau_cmd};
  plateau_flags.add("V0", "potential strength");
  plateau_flags.add("lambda", "range parameter (> 0)");
  plateau_flags.add("gamma", "barrier parameter");
  plateau_flags.add("ell", "angular momentum");
  plateau_flags.add("N", "basis size (default 100)");
  plateau_flags.add("mu-lo", "scan start (default lambda/2)");
  plateau_flags.add("mu-hi", "scan end (default 20 lambda)");
  plateau_flags.add("steps", "grid points (default 40)");
  plateau_flags.add("format", "table or csv (default table)");
  plateau_flags.add("out", "output file");
  std::string plateau_config;
  plateau_cmd->add_option("--config", plateau_config, "key = value file; flags take precedence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return spectra::cli::validation;
  }

  try {
    if (*run_cmd) {
      const auto spec = spectra::cli::make_run_spec(layered(run_flags, run_config, spectra::cli::run_keys()));
      const auto outcome = spectra::cli::run(spec);
      write_output(spec.out, spectra::cli::render(outcome.report, spec.format));
      const bool warnings_in_output = spec.format == spectra::cli::Format::table && (spec.out.empty() || spec.out == "-");
      if (!warnings_in_output)
        for (const auto& w : outcome.report.warnings) std::cerr << "warning: " << w << "\n";
      return outcome.exit_code;
    }
    if (*tables_cmd) {
      topt.tolerance = tolerance;
      topt.with_aim = tables_method != "hdm";
      topt.with_hdm = tables_method != "aim";
      const auto outcome = spectra::cli::reproduce_tables(topt);
      write_output(tables_out, outcome.text);
      return outcome.exit_code;
    }
    if (*curves_cmd) {
      const std::vector<std::string> keys{"V0", "lambda", "gamma", "r-max", "points", "which", "out"};
      const auto s = layered(curve_flags, curves_config, keys);
      const spectra::PotentialParams p(required(s, "V0"), required(s, "lambda"), required(s, "gamma"));
      const double r_max = number(s, "r-max", 20.0 / p.lambda());
      const int points = s.count("points") ? spectra::cli::detail::parse_value<int>("points", s.at("points")) : 401;
      const auto which = spectra::cli::parse_curve(s.count("which") ? s.at("which") : "both");
      write_output(s.count("out") ? s.at("out") : "", spectra::cli::emit_curves(p, r_max, points, which));
      return spectra::cli::ok;
    }
    if (*plateau_cmd) {
      const std::vector<std::string> keys{"V0", "lambda", "gamma", "ell",   "N",
                                          "mu-lo", "mu-hi", "steps", "format", "out"};
      const auto s = layered(plateau_flags, plateau_config, keys);
      const int ell = s.count("ell") ? spectra::cli::detail::parse_value<int>("ell", s.at("ell")) : 0;
      const spectra::PotentialParams p(required(s, "V0"), required(s, "lambda"), required(s, "gamma"), ell);
      spectra::HdmConfig cfg;
      cfg.ell = ell;
      if (s.count("N")) cfg.N = spectra::cli::detail::parse_value<int>("N", s.at("N"));
      const double lo = number(s, "mu-lo", p.lambda() / 2);
      const double hi = number(s, "mu-hi", 20 * p.lambda());
      const int steps = s.count("steps") ? spectra::cli::detail::parse_value<int>("steps", s.at("steps")) : 40;
      const std::string format = s.count("format") ? s.at("format") : "table";
      if (format != "table" && format != "csv") throw spectra::config_error("plateau format must be table or csv");
      const auto rep = spectra::plateau_scan(p, cfg, lo, hi, steps);
      write_output(s.count("out") ? s.at("out") : "",
                   format == "csv" ? spectra::cli::plateau_csv(rep) : spectra::cli::plateau_table(rep));
      return rep.has_plateau ? spectra::cli::ok : spectra::cli::convergence;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return spectra::cli::exit_code_for(e);
  }
  return spectra::cli::ok;
}
