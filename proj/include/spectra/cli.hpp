#pragma once

// Command-level operations behind the `spectra` tool: run specs built from
// flags and config files, reproduction of the reference tables, curve data and
// plateau scans. Argument parsing itself lives in tools/.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aim.hpp"
#include "errors.hpp"
#include "golden.hpp"
#include "hdm.hpp"
#include "potential.hpp"
#include "report.hpp"

namespace spectra::cli {

enum exit_code : int { ok = 0, validation = 2, convergence = 3 };

/// Maps library exceptions onto process exit codes.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const no_convergence*>(&e) || dynamic_cast<const series_exhausted*>(&e) ||
      dynamic_cast<const not_positive_definite*>(&e))
    return convergence;
  return validation;
}

// ---------------------------------------------------------------------------
// Settings: flat key -> value text, shared by config files and flags.

using Settings = std::map<std::string, std::string>;

inline const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys{"V0", "lambda", "gamma", "ell",    "method", "N",
                                             "mu", "n-max",  "digits", "format", "out"};
  return keys;
}

/// Underscores and dashes are interchangeable in keys.
inline std::string normalize_key(std::string_view key) {
  std::string k(key);
  for (auto& c : k)
    if (c == '_') c = '-';
  return k;
}

namespace detail {
inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace detail

/// `key = value` lines; `#` starts a comment. Unknown keys are rejected.
inline Settings parse_config(std::string_view text, const std::vector<std::string>& allowed = run_keys()) {
  Settings out;
  int line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = normalize_key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw config_error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty()) throw config_error("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    out[key] = std::string(value);
  }
  return out;
}

inline Settings load_config(const std::string& path, const std::vector<std::string>& allowed = run_keys()) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), allowed);
}

/// Later layers win: merge(defaults, file, flags).
inline Settings merge(std::initializer_list<Settings> layers) {
  Settings out;
  for (const auto& layer : layers)
    for (const auto& [k, v] : layer) out[k] = v;
  return out;
}

namespace detail {
template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw config_error("invalid value '" + text + "' for " + key);
  return v;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// run

enum class Method { aim, hdm, both };
enum class Format { table, csv, json };

struct RunSpec {
  Method method = Method::both;
  PotentialParams params{1.0, 1.0, 0.5};
  AimConfig aim;
  HdmConfig hdm;
  bool mu_given = false;
  Format format = Format::table;
  std::string out;  ///< empty: standard output

  [[nodiscard]] bool uses_aim() const { return method != Method::hdm; }
  [[nodiscard]] bool uses_hdm() const { return method != Method::aim; }
};

inline Format parse_format(const std::string& s) {
  if (s == "table") return Format::table;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw config_error("format must be table, csv or json (got '" + s + "')");
}

inline RunSpec make_run_spec(const Settings& s) {
  for (const auto& [k, v] : s)
    if (std::find(run_keys().begin(), run_keys().end(), k) == run_keys().end())
      throw config_error("unknown setting '" + k + "'");
  auto required = [&](const char* key) {
    const auto it = s.find(key);
    if (it == s.end()) throw config_error(std::string("missing required parameter ") + key);
    return detail::parse_value<double>(key, it->second);
  };
  auto get = [&](const char* key) -> const std::string* {
    const auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };

  RunSpec spec;
  if (const auto* m = get("method")) {
    if (*m == "aim")
      spec.method = Method::aim;
    else if (*m == "hdm")
      spec.method = Method::hdm;
    else if (*m == "both")
      spec.method = Method::both;
    else
      throw config_error("method must be aim, hdm or both (got '" + *m + "')");
  }
  const int ell = get("ell") ? detail::parse_value<int>("ell", *get("ell")) : 0;
  spec.params = PotentialParams(required("V0"), required("lambda"), required("gamma"), ell);

  auto only_for = [&](const char* key, bool selected, const char* engine) {
    if (get(key) && !selected)
      throw config_error(std::string(key) + " applies to the " + engine + " engine, which is not selected");
  };
  only_for("n-max", spec.uses_aim(), "AIM");
  only_for("digits", spec.uses_aim(), "AIM");
  only_for("N", spec.uses_hdm(), "HDM");
  only_for("mu", spec.uses_hdm(), "HDM");
  if (spec.uses_aim() && ell != 0) throw config_error("the AIM engine handles ell = 0 only; use --method hdm");

  if (const auto* v = get("n-max")) spec.aim.n_max = detail::parse_value<int>("n-max", *v);
  if (const auto* v = get("digits")) spec.aim.precision = Precision(detail::parse_value<int>("digits", *v));
  if (const auto* v = get("N")) spec.hdm.N = detail::parse_value<int>("N", *v);
  if (const auto* v = get("mu")) {
    spec.hdm.mu = detail::parse_value<double>("mu", *v);
    spec.mu_given = true;
  }
  spec.hdm.ell = ell;
  if (const auto* v = get("format")) spec.format = parse_format(*v);
  if (const auto* v = get("out")) spec.out = *v;

  if (spec.uses_aim()) spec.aim.validate();
  if (spec.uses_hdm()) spec.hdm.validate();
  return spec;
}

struct RunOutcome {
  SpectrumReport report;
  int exit_code = ok;
};

inline std::string render(const SpectrumReport& r, Format f) {
  switch (f) {
    case Format::csv: return to_csv(r);
    case Format::json: return to_json(r);
    case Format::table: break;
  }
  return to_table(r);
}

/// Runs the selected engines. Exit code 3 when some AIM level never met the
/// stability criterion; the report still carries its last estimate.
inline RunOutcome run(const RunSpec& spec) {
  const auto& p = spec.params;
  RunOutcome res;
  auto& rep = res.report;
  rep.V0 = p.V0();
  rep.lambda = p.lambda();
  rep.gamma = p.gamma();
  rep.ell = p.ell();
  const auto check = bound_state_precheck(p);
  rep.precheck = check.message;
  if (!check.ok) rep.warnings.push_back("precheck: " + check.message);
  if (!p.interesting_regime()) rep.warnings.push_back("gamma lies outside (0, 1)");

  std::optional<std::vector<std::pair<double, bool>>> aim_levels;
  std::optional<std::vector<double>> hdm_levels;

  if (spec.uses_aim()) {
    rep.methods.push_back("aim");
    const auto aim = aim_spectrum(p, spec.aim);
    aim_levels.emplace();
    for (const auto& e : aim.estimates()) aim_levels->emplace_back(e.energy, e.converged);
    rep.aim = AimMeta{aim.n_max, aim.digits, spec.aim.x0, static_cast<int>(aim.levels.size())};
    if (!aim.unconverged.empty()) {
      rep.warnings.push_back(std::to_string(aim.unconverged.size()) +
                             " AIM level(s) did not stabilize by n_max = " + std::to_string(aim.n_max) +
                             "; raise --n-max");
      res.exit_code = convergence;
    }
  }
  if (spec.uses_hdm()) {
    rep.methods.push_back("hdm");
    HdmConfig cfg = spec.hdm;
    HdmMeta meta;
    meta.mu_source = "user";
    if (!spec.mu_given) {
      const auto plateau = default_plateau(p, cfg);
      cfg.mu = plateau.recommended_mu;
      meta.mu_source = "plateau";
      meta.plateau_window = std::array<double, 2>{round_sig12(plateau.mu[plateau.window_begin]),
                                                  round_sig12(plateau.mu[plateau.window_end - 1])};
      if (!plateau.has_plateau)
        rep.warnings.push_back("no plateau of stability in mu; using the most stable grid point");
    }
    const auto h = hdm_spectrum(p, cfg);
    hdm_levels = h.bound;
    meta.N = h.N;
    meta.mu = round_sig12(h.mu);
    for (const double e : h.flagged) meta.flagged.push_back(round_sig12(e));
    rep.hdm = std::move(meta);
  }
  rep.levels = align_levels(aim_levels, hdm_levels);
  return res;
}

// ---------------------------------------------------------------------------
// Reference tables

namespace tolerance {
inline constexpr double hdm_table1 = 1e-8;
inline constexpr double hdm_table2 = 1e-9;
inline constexpr double aim_relative = 1e-6;
inline constexpr double aim_shallow_absolute = 1e-4;
inline constexpr double aim_shallow_cut = 0.05;
inline constexpr double cross_method = 1e-6;
}  // namespace tolerance

struct TablesOptions {
  std::optional<double> tolerance;  ///< absolute, replaces every per-cell tolerance
  int n_max = 120;
  int digits = 64;
  int N = 100;
  bool with_aim = true;
  bool with_hdm = true;
};

struct ColumnRun {
  golden::Column column;
  double mu = 0;
  double window_lo = 0;
  double window_hi = 0;
  std::vector<double> hdm;
  std::vector<AimResult::Estimate> aim;
  double hdm_seconds = 0;
  double aim_seconds = 0;
};

inline PotentialParams params_of(const golden::Column& c) { return {c.V0, c.lambda, c.gamma, 0}; }

inline ColumnRun run_column(const golden::Column& col, const TablesOptions& opt) {
  using clock = std::chrono::steady_clock;
  ColumnRun out;
  out.column = col;
  const auto p = params_of(col);
  if (opt.with_hdm) {
    const auto t0 = clock::now();
    HdmConfig cfg;
    cfg.N = opt.N;
    const auto plateau = default_plateau(p, cfg);
    cfg.mu = plateau.recommended_mu;
    out.mu = cfg.mu;
    out.window_lo = plateau.mu[plateau.window_begin];
    out.window_hi = plateau.mu[plateau.window_end - 1];
    out.hdm = hdm_spectrum(p, cfg).bound;
    out.hdm_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  }
  if (opt.with_aim) {
    const auto t0 = clock::now();
    AimConfig cfg;
    cfg.n_max = opt.n_max;
    cfg.precision = Precision(opt.digits);
    out.aim = aim_spectrum(p, cfg).estimates();
    out.aim_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  }
  return out;
}

struct CellCheck {
  golden::Cell cell;
  std::optional<double> computed;
  bool converged = true;
  double diff = 0;  ///< absolute, or relative when `relative`
  double tol = 0;
  bool relative = false;
  bool pass = false;
};

inline double hdm_cell_tolerance(const golden::Cell& c) {
  return c.table == 2 ? tolerance::hdm_table2 : tolerance::hdm_table1;
}

inline CellCheck check_hdm_cell(const golden::Cell& c, const std::vector<double>& hdm,
                                std::optional<double> tol_override = {}) {
  CellCheck k;
  k.cell = c;
  k.tol = tol_override.value_or(hdm_cell_tolerance(c));
  if (static_cast<std::size_t>(c.n) < hdm.size()) {
    k.computed = hdm[static_cast<std::size_t>(c.n)];
    k.diff = std::abs(*k.computed - c.energy);
    k.pass = k.diff <= k.tol;
  }
  return k;
}

inline CellCheck check_aim_cell(const golden::Cell& c, const std::vector<AimResult::Estimate>& aim,
                                std::optional<double> tol_override = {}) {
  CellCheck k;
  k.cell = c;
  if (tol_override) {
    k.tol = *tol_override;
  } else if (std::abs(c.energy) > tolerance::aim_shallow_cut) {
    k.tol = tolerance::aim_relative;
    k.relative = true;
  } else {
    k.tol = tolerance::aim_shallow_absolute;
  }
  if (static_cast<std::size_t>(c.n) < aim.size()) {
    const auto& e = aim[static_cast<std::size_t>(c.n)];
    k.computed = e.energy;
    k.converged = e.converged;
    k.diff = std::abs(e.energy - c.energy);
    if (k.relative) k.diff /= std::abs(c.energy);
    k.pass = k.diff <= k.tol;
  }
  return k;
}

struct TablesOutcome {
  std::string text;
  std::vector<CellCheck> checks;
  int exit_code = ok;
};

namespace detail {
inline std::string check_line(const CellCheck& k) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "  %-4s n=%d  published %-16s computed %-20s %s %-10.3e tol %.0e %s%s",
                k.cell.method.c_str(), k.cell.n, k.cell.text.c_str(),
                k.computed ? format_sig12(*k.computed).c_str() : "(missing)", k.relative ? "rel" : "abs", k.diff,
                k.tol, k.pass ? "ok" : "FAIL", k.converged ? "" : " (not stabilized)");
  return buf;
}
}  // namespace detail

/// Recomputes every column of the reference tables and diffs them against the
/// published AIM and HDM rows.
inline TablesOutcome reproduce_tables(const TablesOptions& opt = {}) {
  TablesOutcome out;
  std::ostringstream os;
  for (const auto& col : golden::columns()) {
    const auto r = run_column(col, opt);
    os << "Table " << col.table << ", " << col.name << " (V0 = " << format_exact(col.V0)
       << ", lambda = " << format_exact(col.lambda) << ", gamma = " << format_exact(col.gamma) << ")\n";
    if (opt.with_hdm) {
      os << "  HDM N = " << opt.N << ", mu = " << format_sig12(r.mu) << " (plateau " << format_sig12(r.window_lo)
         << " .. " << format_sig12(r.window_hi) << "), " << r.hdm.size() << " bound state(s)\n";
      for (const auto& c : golden::select(col, "HDM")) {
        out.checks.push_back(check_hdm_cell(c, r.hdm, opt.tolerance));
        os << detail::check_line(out.checks.back()) << "\n";
      }
    }
    if (opt.with_aim) {
      os << "  AIM n_max = " << opt.n_max << ", digits = " << opt.digits << "\n";
      for (const auto& c : golden::select(col, "AIM")) {
        out.checks.push_back(check_aim_cell(c, r.aim, opt.tolerance));
        os << detail::check_line(out.checks.back()) << "\n";
      }
    }
    // Published AIM/HDM pairs that disagree are reported, never counted.
    const auto aim_rows = golden::select(col, "AIM");
    const auto hdm_rows = golden::select(col, "HDM");
    for (const auto& a : aim_rows) {
      if (a.note != "aim-hdm-mismatch") continue;
      for (const auto& h : hdm_rows) {
        if (h.n != a.n) continue;
        os << "  note: published AIM - HDM at n=" << a.n << " is " << format_sig12(a.energy - h.energy)
           << " (known discrepancy in the reference data, not a failure)";
        if (opt.with_aim && opt.with_hdm && static_cast<std::size_t>(a.n) < r.aim.size() &&
            static_cast<std::size_t>(a.n) < r.hdm.size())
          os << "; computed " << format_sig12(r.aim[static_cast<std::size_t>(a.n)].energy - r.hdm[static_cast<std::size_t>(a.n)]);
        os << "\n";
      }
    }
  }
  std::size_t failed = 0;
  for (const auto& k : out.checks) failed += k.pass ? 0 : 1;
  if (failed) {
    out.exit_code = convergence;
    os << "\n" << failed << " of " << out.checks.size() << " cell(s) outside tolerance:\n";
    for (const auto& k : out.checks)
      if (!k.pass) {
        const auto col = k.cell.column;
        os << "  Table " << k.cell.table << " " << col << " " << detail::check_line(k).substr(2) << "\n";
      }
  } else {
    os << "\nall " << out.checks.size() << " cells within tolerance\n";
  }
  out.text = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// Curves and plateau

enum class Curve { V, U, both };

inline Curve parse_curve(const std::string& s) {
  if (s == "V") return Curve::V;
  if (s == "U") return Curve::U;
  if (s == "both") return Curve::both;
  throw config_error("which must be V, U or both (got '" + s + "')");
}

/// Uniform samples on [0, r_max] as CSV `r,V,U`. V is left empty at r = 0 and
/// the unselected column is empty throughout.
inline std::string emit_curves(const PotentialParams& p, double r_max, int points, Curve which) {
  if (!(r_max > 0)) throw config_error("r_max must be positive");
  if (points < 2) throw config_error("points must be at least 2");
  std::string out = "r,V,U\n";
  for (int i = 0; i < points; ++i) {
    const double r = i == points - 1 ? r_max : r_max * i / (points - 1);
    out += format_sig12(r);
    out += ',';
    if (which != Curve::U && r > 0) out += format_sig12(eval_V(p, r));
    out += ',';
    if (which != Curve::V) out += format_sig12(eval_U(p, r));
    out += '\n';
  }
  return out;
}

inline std::string plateau_csv(const PlateauReport& rep) {
  std::string out = "mu";
  for (int k = 0; k < rep.states; ++k) out += ",E_" + std::to_string(k);
  out += ",ground_digits\n";
  for (std::size_t i = 0; i < rep.mu.size(); ++i) {
    out += format_sig12(rep.mu[i]);
    for (const double e : rep.levels[i]) out += ',' + format_sig12(e);
    out += ',';
    if (i + 1 < rep.mu.size()) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.2f", rep.adjacent_digits[i][0]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline std::string plateau_table(const PlateauReport& rep) {
  std::ostringstream os;
  char buf[64];
  os << "     mu                 E_0                  digits(E_0)\n";
  for (std::size_t i = 0; i < rep.mu.size(); ++i) {
    const bool in = i >= rep.window_begin && i < rep.window_end;
    os << (in ? " * " : "   ") << format_sig12(rep.mu[i]) << "  " << format_sig12(rep.levels[i][0]);
    if (i + 1 < rep.mu.size()) {
      std::snprintf(buf, sizeof buf, "  %5.2f", rep.adjacent_digits[i][0]);
      os << buf;
    }
    os << "\n";
  }
  os << "window (*): mu in [" << format_sig12(rep.mu[rep.window_begin]) << ", "
     << format_sig12(rep.mu[rep.window_end - 1]) << "], " << (rep.has_plateau ? "plateau found" : "no plateau")
     << "\nrecommended mu: " << format_sig12(rep.recommended_mu) << "\n";
  for (int k = 0; k < rep.states; ++k) {
    std::snprintf(buf, sizeof buf, "  state %d: %.2f digits in window, %.2f over the scan\n", k,
                  rep.window_digits[static_cast<std::size_t>(k)], rep.range_digits[static_cast<std::size_t>(k)]);
    os << buf;
  }
  return os.str();
}

}  // namespace spectra::cli
