#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qleak/detector.hpp"
#include "qleak/power.hpp"
#include "qleak/simulate.hpp"

namespace qleak {

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

// JSON has no literal for infinities: the statistic becomes "+inf"/"-inf",
// an uncomputed threshold becomes null.
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

inline std::string fmt(double v, const char* spec = "%.12g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace detail

inline nlohmann::json to_json(const TestResult& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& d : r.levels) {
    levels.push_back({
        {"k", d.level},
        {"qx", d.qx},
        {"qy", d.qy},
        {"diff", d.gap},
        {"sigma", d.sigma},
        {"in_k_sub", d.in_k_sub},
        {"in_k_sub_max", d.in_k_sub_max},
    });
  }
  return nlohmann::json{
      {"schema_version", kReportSchemaVersion},
      {"decision", std::string(decision_name(r.decision))},
      {"statistic", detail::json_number(r.statistic)},
      {"threshold", detail::json_number(r.threshold)},
      {"alpha", r.alpha},
      {"delta", r.delta},
      {"n", r.n},
      {"m", r.dependence.m},
      {"m_raw_x", r.dependence.raw_x},
      {"m_raw_y", r.dependence.raw_y},
      {"kind", std::string(data_kind_name(r.kind.kind))},
      {"distinct_count", r.kind.distinct_count},
      {"B", r.replicates},
      {"seed", r.seed},
      {"degenerate", r.degenerate},
      {"levels", levels},
  };
}

inline std::string to_text(const TestResult& r) {
  std::size_t in_sub = 0;
  std::size_t in_max = 0;
  for (const auto& d : r.levels) {
    in_sub += d.in_k_sub ? 1 : 0;
    in_max += d.in_k_sub_max ? 1 : 0;
  }
  std::ostringstream out;
  out << "decision:   " << decision_name(r.decision) << "\n"
      << "statistic:  " << detail::fmt(r.statistic) << "\n"
      << "threshold:  " << detail::fmt(r.threshold) << "\n"
      << "alpha:      " << detail::fmt(r.alpha) << "\n"
      << "delta:      " << detail::fmt(r.delta) << "\n"
      << "n:          " << r.n << "\n"
      << "m:          " << r.dependence.m << " (raw " << detail::fmt(r.dependence.raw_x, "%.4g")
      << " / " << detail::fmt(r.dependence.raw_y, "%.4g") << ")\n"
      << "kind:       " << data_kind_name(r.kind.kind) << " (" << r.kind.distinct_count
      << " distinct)\n"
      << "B:          " << r.replicates << "\n"
      << "seed:       " << r.seed << "\n"
      << "levels:     " << r.levels.size() << " total, " << in_sub << " in K_sub, " << in_max
      << " in K_sub_max\n";
  if (r.degenerate) out << "note:       degenerate input (both series constant and equal)\n";
  return out.str();
}

inline std::string to_csv(const TestResult& r) {
  std::ostringstream out;
  out << "# decision=" << decision_name(r.decision) << " statistic=" << detail::fmt(r.statistic)
      << " threshold=" << detail::fmt(r.threshold) << " alpha=" << detail::fmt(r.alpha)
      << " delta=" << detail::fmt(r.delta) << " n=" << r.n << " m=" << r.dependence.m
      << " kind=" << data_kind_name(r.kind.kind) << " B=" << r.replicates << " seed=" << r.seed
      << "\n";
  out << "k,qx,qy,diff,sigma,in_k_sub,in_k_sub_max\n";
  for (const auto& d : r.levels) {
    out << detail::fmt(d.level) << ',' << detail::fmt(d.qx) << ',' << detail::fmt(d.qy) << ','
        << detail::fmt(d.gap) << ',' << detail::fmt(d.sigma) << ',' << (d.in_k_sub ? 1 : 0) << ','
        << (d.in_k_sub_max ? 1 : 0) << "\n";
  }
  return out.str();
}

inline nlohmann::json to_json(const PowerResult& r) {
  return nlohmann::json{
      {"schema_version", kReportSchemaVersion},
      {"n", r.n},
      {"n_sub_raw", r.n_sub},
      {"sigma_hat", r.sigma_hat},
      {"variant", std::string(sigma_variant_name(r.variant))},
      {"formula", std::string(power_formula_name(r.formula))},
      {"m", r.m},
      {"pilot_n", r.pilot_n},
      {"sigma_candidates",
       {{"min", r.sigma_min}, {"median", r.sigma_median}, {"max", r.sigma_max}}},
  };
}

inline std::string to_text(const PowerResult& r) {
  std::ostringstream out;
  out << "n:          " << r.n << "\n"
      << "n_sub_raw:  " << detail::fmt(r.n_sub) << "\n"
      << "sigma_hat:  " << detail::fmt(r.sigma_hat) << "\n"
      << "variant:    " << sigma_variant_name(r.variant) << "\n"
      << "formula:    " << power_formula_name(r.formula) << "\n"
      << "m:          " << r.m << "\n"
      << "pilot_n:    " << r.pilot_n << "\n"
      << "sigma min/median/max: " << detail::fmt(r.sigma_min, "%.6g") << " / "
      << detail::fmt(r.sigma_median, "%.6g") << " / " << detail::fmt(r.sigma_max, "%.6g") << "\n";
  return out.str();
}

inline std::string to_csv(const PowerResult& r) {
  std::ostringstream out;
  out << "n,n_sub_raw,sigma_hat,variant,formula,m,pilot_n\n";
  out << r.n << ',' << detail::fmt(r.n_sub) << ',' << detail::fmt(r.sigma_hat) << ','
      << sigma_variant_name(r.variant) << ',' << power_formula_name(r.formula) << ',' << r.m
      << ',' << r.pilot_n << "\n";
  return out.str();
}

inline nlohmann::json to_json(const RejectionSurface& s) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : s.cells) {
    cells.push_back({
        {"phi", c.phi},
        {"mu", c.mu},
        {"n", c.n},
        {"delta", c.delta},
        {"alpha", c.alpha},
        {"reps", c.reps},
        {"reject_rate", c.reject_rate},
        {"stderr", c.stderror},
    });
  }
  return nlohmann::json{{"schema_version", kReportSchemaVersion}, {"cells", cells}};
}

inline std::string to_csv(const RejectionSurface& s) {
  std::ostringstream out;
  out << "phi,mu,n,delta,alpha,reps,reject_rate,stderr\n";
  for (const auto& c : s.cells) {
    out << detail::fmt(c.phi) << ',' << detail::fmt(c.mu) << ',' << c.n << ','
        << detail::fmt(c.delta) << ',' << detail::fmt(c.alpha) << ',' << c.reps << ','
        << detail::fmt(c.reject_rate) << ',' << detail::fmt(c.stderror) << "\n";
  }
  return out.str();
}

inline std::string to_text(const RejectionSurface& s) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%8s %8s %8s %8s %8s %6s %12s %10s\n", "phi", "mu", "n",
                "delta", "alpha", "reps", "reject_rate", "stderr");
  out << line;
  for (const auto& c : s.cells) {
    std::snprintf(line, sizeof(line), "%8.3g %8.3g %8zu %8.3g %8.3g %6zu %12.6g %10.4g\n", c.phi,
                  c.mu, c.n, c.delta, c.alpha, c.reps, c.reject_rate, c.stderror);
    out << line;
  }
  return out.str();
}

}  // namespace qleak
