#pragma once

// Side-by-side spectrum reports and their table / CSV / JSON renderings.
// Energies are stored already rounded to 12 significant digits so that every
// rendering is exact and JSON parses back to an identical report.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace spectra {

/// "%.11E": 12 significant digits, E notation.
inline std::string format_sig12(double x) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.11E", x);
  return buf.data();
}

inline double round_sig12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_sig12(x).c_str(), nullptr);
}

/// Shortest text that reads back to the same double.
inline std::string format_exact(double x) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

struct ReportLevel {
  int n = 0;
  std::optional<double> e_aim;
  std::optional<bool> aim_converged;
  std::optional<double> e_hdm;
  std::optional<double> delta;      ///< E_aim - E_hdm
  std::optional<double> rel_delta;  ///< |delta| / |E_hdm|

  friend bool operator==(const ReportLevel&, const ReportLevel&) = default;
};

struct AimMeta {
  int n_max = 0;
  int digits = 0;
  double x0 = 0;
  int converged = 0;

  friend bool operator==(const AimMeta&, const AimMeta&) = default;
};

struct HdmMeta {
  int N = 0;
  double mu = 0;
  std::string mu_source;  ///< "plateau" or "user"
  std::optional<std::array<double, 2>> plateau_window;
  std::vector<double> flagged;

  friend bool operator==(const HdmMeta&, const HdmMeta&) = default;
};

struct SpectrumReport {
  double V0 = 0;
  double lambda = 0;
  double gamma = 0;
  int ell = 0;
  std::vector<std::string> methods;
  std::vector<ReportLevel> levels;
  std::optional<AimMeta> aim;
  std::optional<HdmMeta> hdm;
  std::string precheck;
  std::vector<std::string> warnings;

  friend bool operator==(const SpectrumReport&, const SpectrumReport&) = default;
};

/// Aligns the two level lists by index (both ascending) and fills deltas
/// where both methods produced the level.
inline std::vector<ReportLevel> align_levels(const std::optional<std::vector<std::pair<double, bool>>>& aim,
                                             const std::optional<std::vector<double>>& hdm) {
  const std::size_t a = aim ? aim->size() : 0;
  const std::size_t h = hdm ? hdm->size() : 0;
  std::vector<ReportLevel> out(std::max(a, h));
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& l = out[i];
    l.n = static_cast<int>(i);
    if (i < a) {
      l.e_aim = round_sig12((*aim)[i].first);
      l.aim_converged = (*aim)[i].second;
    }
    if (i < h) l.e_hdm = round_sig12((*hdm)[i]);
    if (l.e_aim && l.e_hdm) {
      const double d = (*aim)[i].first - (*hdm)[i];
      l.delta = round_sig12(d);
      if ((*hdm)[i] != 0) l.rel_delta = round_sig12(std::abs(d) / std::abs((*hdm)[i]));
    }
  }
  return out;
}

namespace detail {

inline std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          std::array<char, 8> buf{};
          std::snprintf(buf.data(), buf.size(), "\\u%04x", static_cast<unsigned>(ch));
          out += buf.data();
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

inline std::string opt_sig12(const std::optional<double>& v) { return v ? format_sig12(*v) : std::string(); }

}  // namespace detail

inline std::string to_json(const SpectrumReport& r) {
  using detail::json_string;
  std::ostringstream os;
  os << "{\n";
  os << "  \"params\": {\"V0\": " << format_exact(r.V0) << ", \"lambda\": " << format_exact(r.lambda)
     << ", \"gamma\": " << format_exact(r.gamma) << ", \"ell\": " << r.ell << "},\n";
  os << "  \"methods\": [";
  for (std::size_t i = 0; i < r.methods.size(); ++i) os << (i ? ", " : "") << json_string(r.methods[i]);
  os << "],\n";
  os << "  \"levels\": [";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    os << (i ? ",\n" : "\n") << "    {\"n\": " << l.n;
    if (l.e_aim) os << ", \"E_aim\": " << format_sig12(*l.e_aim);
    if (l.aim_converged) os << ", \"aim_converged\": " << (*l.aim_converged ? "true" : "false");
    if (l.e_hdm) os << ", \"E_hdm\": " << format_sig12(*l.e_hdm);
    if (l.delta) os << ", \"delta\": " << format_sig12(*l.delta);
    if (l.rel_delta) os << ", \"rel_delta\": " << format_sig12(*l.rel_delta);
    os << "}";
  }
  os << (r.levels.empty() ? "],\n" : "\n  ],\n");
  os << "  \"meta\": {";
  bool first = true;
  auto sep = [&] {
    os << (first ? "\n" : ",\n");
    first = false;
  };
  if (r.aim) {
    sep();
    os << "    \"aim\": {\"n_max\": " << r.aim->n_max << ", \"digits\": " << r.aim->digits
       << ", \"x0\": " << format_exact(r.aim->x0) << ", \"converged\": " << r.aim->converged << "}";
  }
  if (r.hdm) {
    sep();
    os << "    \"hdm\": {\"N\": " << r.hdm->N << ", \"mu\": " << format_sig12(r.hdm->mu)
       << ", \"mu_source\": " << json_string(r.hdm->mu_source);
    if (r.hdm->plateau_window)
      os << ", \"plateau_window\": [" << format_sig12((*r.hdm->plateau_window)[0]) << ", "
         << format_sig12((*r.hdm->plateau_window)[1]) << "]";
    os << ", \"flagged\": [";
    for (std::size_t i = 0; i < r.hdm->flagged.size(); ++i) os << (i ? ", " : "") << format_sig12(r.hdm->flagged[i]);
    os << "]}";
  }
  sep();
  os << "    \"precheck\": " << json_string(r.precheck);
  sep();
  os << "    \"warnings\": [";
  for (std::size_t i = 0; i < r.warnings.size(); ++i) os << (i ? ", " : "") << json_string(r.warnings[i]);
  os << "]\n  }\n}\n";
  return os.str();
}

namespace detail {
inline SpectrumReport report_from_json(const nlohmann::json& j) {
  SpectrumReport r;
  const auto& p = j.at("params");
  r.V0 = p.at("V0").get<double>();
  r.lambda = p.at("lambda").get<double>();
  r.gamma = p.at("gamma").get<double>();
  r.ell = p.at("ell").get<int>();
  r.methods = j.at("methods").get<std::vector<std::string>>();
  for (const auto& lj : j.at("levels")) {
    ReportLevel l;
    l.n = lj.at("n").get<int>();
    if (lj.contains("E_aim")) l.e_aim = lj["E_aim"].get<double>();
    if (lj.contains("aim_converged")) l.aim_converged = lj["aim_converged"].get<bool>();
    if (lj.contains("E_hdm")) l.e_hdm = lj["E_hdm"].get<double>();
    if (lj.contains("delta")) l.delta = lj["delta"].get<double>();
    if (lj.contains("rel_delta")) l.rel_delta = lj["rel_delta"].get<double>();
    r.levels.push_back(l);
  }
  const auto& m = j.at("meta");
  if (m.contains("aim")) {
    const auto& a = m["aim"];
    r.aim = AimMeta{a.at("n_max").get<int>(), a.at("digits").get<int>(), a.at("x0").get<double>(),
                    a.at("converged").get<int>()};
  }
  if (m.contains("hdm")) {
    const auto& h = m["hdm"];
    HdmMeta hm;
    hm.N = h.at("N").get<int>();
    hm.mu = h.at("mu").get<double>();
    hm.mu_source = h.at("mu_source").get<std::string>();
    if (h.contains("plateau_window")) {
      const auto w = h["plateau_window"].get<std::vector<double>>();
      if (w.size() != 2) throw config_error("plateau_window must have two entries");
      hm.plateau_window = std::array<double, 2>{w[0], w[1]};
    }
    hm.flagged = h.at("flagged").get<std::vector<double>>();
    r.hdm = std::move(hm);
  }
  r.precheck = m.at("precheck").get<std::string>();
  r.warnings = m.at("warnings").get<std::vector<std::string>>();
  return r;
}
}  // namespace detail

inline SpectrumReport from_json(std::string_view text) {
  try {
    return detail::report_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("invalid report JSON: ") + e.what());
  }
}

inline std::string to_csv(const SpectrumReport& r) {
  std::string out = "n,E_aim,aim_converged,E_hdm,delta,rel_delta\n";
  for (const auto& l : r.levels) {
    out += std::to_string(l.n);
    out += ',' + detail::opt_sig12(l.e_aim);
    out += ',';
    if (l.aim_converged) out += *l.aim_converged ? "true" : "false";
    out += ',' + detail::opt_sig12(l.e_hdm);
    out += ',' + detail::opt_sig12(l.delta);
    out += ',' + detail::opt_sig12(l.rel_delta);
    out += '\n';
  }
  return out;
}

inline std::string to_table(const SpectrumReport& r) {
  std::ostringstream os;
  os << "V0 = " << format_exact(r.V0) << "  lambda = " << format_exact(r.lambda)
     << "  gamma = " << format_exact(r.gamma) << "  ell = " << r.ell << "\n";
  if (r.aim)
    os << "AIM: n_max = " << r.aim->n_max << ", digits = " << r.aim->digits << ", x0 = " << format_exact(r.aim->x0)
       << ", " << r.aim->converged << " level(s) met the stability criterion\n";
  if (r.hdm) {
    os << "HDM: N = " << r.hdm->N << ", mu = " << format_sig12(r.hdm->mu) << " (" << r.hdm->mu_source << ")";
    if (r.hdm->plateau_window)
      os << ", plateau [" << format_sig12((*r.hdm->plateau_window)[0]) << ", "
         << format_sig12((*r.hdm->plateau_window)[1]) << "]";
    os << "\n";
  }
  char line[160];
  std::snprintf(line, sizeof line, "%3s  %-20s %-20s %-20s\n", "n", "E_aim", "E_hdm", "delta");
  os << line;
  for (const auto& l : r.levels) {
    std::string aim = detail::opt_sig12(l.e_aim);
    if (l.aim_converged && !*l.aim_converged) aim += " *";
    std::snprintf(line, sizeof line, "%3d  %-20s %-20s %-20s\n", l.n, aim.c_str(), detail::opt_sig12(l.e_hdm).c_str(),
                  detail::opt_sig12(l.delta).c_str());
    os << line;
  }
  if (r.aim && r.aim->converged < static_cast<int>(std::count_if(r.levels.begin(), r.levels.end(),
                                                                 [](const ReportLevel& l) { return l.e_aim.has_value(); })))
    os << "* AIM estimate taken at n_max without meeting the stability criterion\n";
  if (r.hdm && !r.hdm->flagged.empty())
    os << "HDM discarded " << r.hdm->flagged.size() << " negative eigenvalue(s) that moved under basis growth\n";
  os << "precheck: " << r.precheck << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace spectra
