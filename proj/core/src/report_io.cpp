#include "varcert/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace varcert {

namespace {

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string num_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string int_array(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

std::string string_array(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += json_string(v[i]);
  }
  return out + "]";
}

const char* yesno(bool b) { return b ? "true" : "false"; }

// compact form for the human report
std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string brief_vec(const std::vector<double>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += brief(v[i]);
  }
  return out + ")";
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";  // JSON has no inf/nan
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_json(const CertificationReport& r) {
  std::string j = "{\n";
  j += "  \"verdict\": \"" + std::string(to_string(r.verdict)) + "\",\n";
  j += "  \"failure_reason\": ";
  j += r.failure_reason == FailureReason::None ? std::string("null")
                                               : "\"" + std::string(to_string(r.failure_reason)) + "\"";
  j += ",\n";
  j += "  \"failed_stages\": " + string_array(r.failed_stages) + ",\n";
  j += "  \"message\": " + (r.message.empty() ? std::string("null") : json_string(r.message)) + ",\n";
  j += "  \"partial_run\": " + std::string(yesno(r.partial_run)) + ",\n";
  j += "  \"delta_star\": " + format_double(r.delta_star) + ",\n";

  j += "  \"stationarity\": ";
  if (r.stationarity) {
    j += "{\"max_abs\": " + format_double(r.stationarity->max_abs) +
         ", \"interior_max_abs\": " + format_double(r.stationarity->interior_max_abs) +
         ", \"threshold\": " + format_double(r.stationarity->threshold) + "}";
  } else {
    j += "null";
  }
  j += ",\n";

  j += "  \"members\": ";
  if (r.members) {
    j += "{\"max_interior_residual\": " + format_double(r.members->max_interior_residual) +
         ", \"worst_lambda\": " + num_array(r.members->worst_lambda) +
         ", \"threshold\": " + format_double(r.members->threshold) + "}";
  } else {
    j += "null";
  }
  j += ",\n";

  j += "  \"exactness\": ";
  if (r.exactness) {
    j += "{\"max_abs_residual\": " + format_double(r.exactness->max_abs_residual) +
         ", \"num_points\": " + std::to_string(r.exactness->num_points) +
         ", \"num_skipped\": " + std::to_string(r.exactness->num_skipped) + "}";
  } else {
    j += "null";
  }
  j += ",\n";

  j += "  \"convexity\": ";
  if (r.convexity) {
    j += "{\"min_eigenvalue\": " + format_double(r.convexity->min_eigenvalue) +
         ", \"is_psd\": " + yesno(r.convexity->is_psd) +
         ", \"num_samples\": " + std::to_string(r.convexity->num_samples) + ", \"witness\": ";
    if (r.convexity->witness) {
      j += "{\"x\": " + num_array(r.convexity->witness->x) + ", \"y\": " + num_array(r.convexity->witness->y) +
           ", \"z\": " + num_array(r.convexity->witness->z) + "}";
    } else {
      j += "null";
    }
    j += "}";
  } else {
    j += "null";
  }
  j += ",\n";

  j += "  \"invariance\": ";
  if (r.invariance) {
    j += "{\"i_y0\": " + format_double(r.invariance->i_y0) +
         ", \"max_rel_dev\": " + format_double(r.invariance->max_rel_dev) +
         ", \"num_samples\": " + std::to_string(r.invariance->num_samples) +
         ", \"seed\": " + std::to_string(r.invariance->seed) +
         ", \"deviations\": " + num_array(r.invariance->deviations) + "}";
  } else {
    j += "null";
  }
  j += ",\n";

  j += "  \"excess\": ";
  if (r.excess) {
    j += "{\"min_value\": " + format_double(r.excess->min_value) +
         ", \"argmin\": " + std::to_string(r.excess->argmin) +
         ", \"num_negative_nodes\": " + std::to_string(r.excess->num_negative_nodes) +
         ", \"integral\": " + format_double(r.excess->integral) + "}";
  } else {
    j += "null";
  }
  j += ",\n";

  j += "  \"gap_identity_error\": " +
       (r.gap_identity_error ? format_double(*r.gap_identity_error) : std::string("null")) + ",\n";

  j += "  \"comparison\": ";
  if (r.comparison) {
    j += "{\"f_y0\": " + format_double(r.comparison->f_y0) + ", \"min_gap\": " + format_double(r.comparison->min_gap) +
         ", \"num_samples\": " + std::to_string(r.comparison->num_samples) + "}";
  } else {
    j += "null";
  }
  j += ",\n";

  j += "  \"config\": {\n";
  j += "    \"n\": " + std::to_string(r.n) + ",\n";
  j += "    \"N\": " + std::to_string(r.N) + ",\n";
  j += "    \"resolution\": " + int_array(r.resolution) + ",\n";
  j += "    \"tol_el\": " + format_double(r.tolerances.tol_el) + ",\n";
  j += "    \"tol_inv\": " + format_double(r.tolerances.tol_inv) + ",\n";
  j += "    \"tol_exact\": " + format_double(r.tolerances.tol_exact) + ",\n";
  j += "    \"tol_invariance\": " + format_double(r.tolerances.tol_invariance) + ",\n";
  j += "    \"tol_excess\": " + format_double(r.tolerances.tol_excess) + ",\n";
  j += "    \"num_samples\": " + std::to_string(r.sampling.num_samples) + ",\n";
  j += "    \"mode_cap\": " + std::to_string(r.sampling.mode_cap) + ",\n";
  j += "    \"seed\": " + std::to_string(r.sampling.seed) + ",\n";
  j += "    \"deltas\": " + num_array(r.deltas) + ",\n";
  j += "    \"continue_on_failure\": " + std::string(yesno(r.continue_on_failure)) + "\n";
  j += "  }\n";
  j += "}\n";
  return j;
}

void write_report(const std::string& path, const CertificationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write report to " + path);
  out << to_json(report);
}

void print_report(std::ostream& os, const CertificationReport& r) {
  auto stage_time = [&](const char* stage) -> std::string {
    for (const StageTiming& t : r.timings)
      if (t.stage == stage) return "  [" + brief(t.seconds) + " s]";
    return "";
  };

  os << "verdict: " << to_string(r.verdict) << "\n";
  if (r.failure_reason != FailureReason::None) os << "failure_reason: " << to_string(r.failure_reason) << "\n";
  if (!r.message.empty()) os << "message: " << r.message << "\n";
  if (r.verdict == Verdict::InvalidInput) return;

  if (r.stationarity)
    os << "stationarity: interior max |r| = " << brief(r.stationarity->interior_max_abs) << " (gate "
       << brief(r.stationarity->threshold) << ", overall max " << brief(r.stationarity->max_abs) << ")"
       << stage_time("stationarity") << "\n";
  os << "tube: delta_star = " << brief(r.delta_star) << stage_time("tube") << "\n";
  if (r.members)
    os << "members: max interior residual = " << brief(r.members->max_interior_residual) << " at lambda = "
       << brief_vec(r.members->worst_lambda) << " (gate " << brief(r.members->threshold) << ")"
       << stage_time("members") << "\n";
  if (r.exactness)
    os << "exactness: max |R| = " << brief(r.exactness->max_abs_residual) << " over "
       << r.exactness->num_points << " centers, " << r.exactness->num_skipped << " skipped"
       << stage_time("exactness") << "\n";
  if (r.convexity) {
    os << "convexity: min z-Hessian eigenvalue = " << brief(r.convexity->min_eigenvalue) << " over "
       << r.convexity->num_samples << " samples" << stage_time("convexity") << "\n";
    if (r.convexity->witness)
      os << "  witness: x = " << brief_vec(r.convexity->witness->x) << ", y = " << brief_vec(r.convexity->witness->y)
         << ", z = " << brief_vec(r.convexity->witness->z) << "\n";
  }
  if (r.invariance)
    os << "invariance: I(y0) = " << brief(r.invariance->i_y0) << ", max relative deviation = "
       << brief(r.invariance->max_rel_dev) << " over " << r.invariance->num_samples << " samples (seed "
       << r.invariance->seed << ")" << stage_time("invariance") << "\n";
  if (r.excess)
    os << "excess: worst sample min E = " << brief(r.excess->min_value) << " at node " << r.excess->argmin << ", "
       << r.excess->num_negative_nodes << " negative nodes, integral = " << brief(r.excess->integral)
       << stage_time("excess") << "\n";
  if (r.gap_identity_error)
    os << "gap identity: max |F(y)-F(y0) - (int E + I(y)-I(y0))| = " << brief(*r.gap_identity_error)
       << stage_time("gap") << "\n";
  if (r.comparison)
    os << "comparison: min F(y)-F(y0) = " << brief(r.comparison->min_gap) << " (F(y0) = "
       << brief(r.comparison->f_y0) << ", " << r.comparison->num_samples << " samples)"
       << stage_time("comparison") << "\n";
  if (!r.failed_stages.empty()) {
    os << "failed stages:";
    for (const std::string& s : r.failed_stages) os << " " << s;
    os << "\n";
  }
  if (r.partial_run) os << "partial run: only the requested stages were executed; no certification claim\n";
  if (r.verdict == Verdict::NotCertified && !r.partial_run)
    os << "note: NOT_CERTIFIED does not disprove local minimality; these checks are sufficient, not necessary\n";
}

}  // namespace varcert
