#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odeig/eigenpairs.hpp"
#include "odeig/odt.hpp"
#include "odeig/oracle.hpp"
#include "odeig/stability.hpp"

namespace odeig::io {

using nlohmann::json;

inline constexpr int schema_version = 1;

// Fixed-width decimal with enough digits to round-trip any double; used for
// CSV cells so files are bit-stable across writers.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string join_reals(const Vector& v, char sep = '|') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_real(v[i]);
  }
  return out;
}

inline std::string join_ints(const std::vector<int>& v, char sep = '|') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

namespace detail {

inline const json& require_field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw std::invalid_argument(std::string("decomposition JSON: missing field '") + name + "'");
  return *it;
}

inline int require_int(const json& j, const char* name) {
  const json& f = require_field(j, name);
  if (!f.is_number_integer())
    throw std::invalid_argument(std::string("decomposition JSON: field '") + name +
                                "' must be an integer");
  return f.get<int>();
}

inline Vector require_real_array(const json& f, const char* name) {
  if (!f.is_array())
    throw std::invalid_argument(std::string("decomposition JSON: field '") + name +
                                "' must be an array");
  Vector out;
  out.reserve(f.size());
  for (const json& x : f) {
    if (!x.is_number())
      throw std::invalid_argument(std::string("decomposition JSON: field '") + name +
                                  "' must contain numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

} // namespace detail

inline json decomp_to_json(const OrthoDiagDecomp& d) {
  json cols = json::array();
  for (int j = 0; j < d.rank; ++j) cols.push_back(d.u_matrix.column(j));
  return json{{"schema", schema_version},
              {"order", d.order},
              {"dim", d.dim},
              {"rank", d.rank},
              {"lambdas", d.lambdas},
              {"u_columns", cols}};
}

inline OrthoDiagDecomp decomp_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("decomposition JSON: top level must be an object");
  int schema = detail::require_int(j, "schema");
  if (schema != schema_version)
    throw std::invalid_argument("decomposition JSON: unsupported schema version " +
                                std::to_string(schema));
  int order = detail::require_int(j, "order");
  int dim = detail::require_int(j, "dim");
  int rank = detail::require_int(j, "rank");
  Vector lambdas = detail::require_real_array(detail::require_field(j, "lambdas"), "lambdas");

  const json& cols = detail::require_field(j, "u_columns");
  if (!cols.is_array() || cols.empty())
    throw std::invalid_argument("decomposition JSON: field 'u_columns' must be a nonempty array");
  std::vector<Vector> columns;
  for (const json& c : cols) columns.push_back(detail::require_real_array(c, "u_columns"));
  for (const Vector& c : columns)
    if (c.size() != columns[0].size())
      throw std::invalid_argument("decomposition JSON: field 'u_columns' must be rectangular");
  if (dim < 1 || rank < 1)
    throw std::invalid_argument("decomposition JSON: 'dim' and 'rank' must be positive");
  if (columns.size() != static_cast<std::size_t>(rank))
    throw std::invalid_argument("decomposition JSON: 'u_columns' length must equal 'rank'");
  if (columns[0].size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("decomposition JSON: each column must have 'dim' entries");

  return OrthoDiagDecomp(order, dim, rank, Matrix::from_columns(columns), std::move(lambdas));
}

inline OrthoDiagDecomp load_decomp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
  return decomp_from_json(j);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::invalid_argument("write to '" + path + "' failed");
}

// One row per eigenpair; indices are reported 1-based.
inline json pair_to_json(const Eigenpair& p, double residual) {
  std::vector<int> one_based(p.selection.indices);
  for (int& i : one_based) ++i;
  return json{{"k", p.selection.k()},
              {"indices", one_based},
              {"signs", p.sign_pattern},
              {"lambda", p.eigenvalue},
              {"u", p.eigenvector},
              {"residual", residual},
              {"coefficients",
               json{{"raw", p.coefficients.raw},
                    {"normalizer", p.coefficients.normalizer},
                    {"normalized", p.coefficients.coeffs}}}};
}

inline json enumeration_to_json(const EnumerationReport& rep, const OrthoDiagDecomp& d,
                                const std::vector<StabilityReport>* stability = nullptr) {
  json pairs = json::array();
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    json row = pair_to_json(rep.pairs[i], rep.residuals[i]);
    if (stability) {
      const StabilityReport& sr = (*stability)[i];
      row["classification"] = to_string(sr.classification);
      row["spectrum_predicted"] = sr.predicted.sorted_values();
      row["spectrum_computed"] = sr.computed.eigenvalues;
      row["spectrum_error"] = sr.spectrum_error;
    }
    pairs.push_back(std::move(row));
  }
  json out{{"schema", schema_version},
           {"kind", stability ? "classification" : "enumeration"},
           {"order", d.order},
           {"dim", d.dim},
           {"rank", d.rank},
           {"counts",
            json{{"real", rep.real_class_count},
                 {"complex", rep.complex_class_count},
                 {"bound", rep.bound}}},
           {"max_residual", rep.max_residual},
           {"pairs", std::move(pairs)}};
  if (stability) {
    json tally = json::object();
    for (const StabilityReport& sr : *stability) {
      std::string key = to_string(sr.classification);
      tally[key] = (tally.contains(key) ? tally[key].get<int>() : 0) + 1;
    }
    out["classification_counts"] = std::move(tally);
  }
  return out;
}

inline std::string enumeration_to_csv(const EnumerationReport& rep, const OrthoDiagDecomp& d,
                                      const std::vector<StabilityReport>* stability = nullptr) {
  std::ostringstream out;
  out << "k,indices,signs,lambda";
  for (int i = 1; i <= d.dim; ++i) out << ",u_" << i;
  out << ",residual";
  if (stability) out << ",classification,spectrum_predicted,spectrum_computed,spectrum_error";
  out << "\n";
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const Eigenpair& p = rep.pairs[i];
    std::vector<int> one_based(p.selection.indices);
    for (int& x : one_based) ++x;
    out << p.selection.k() << "," << join_ints(one_based) << "," << join_ints(p.sign_pattern)
        << "," << format_real(p.eigenvalue);
    for (double x : p.eigenvector) out << "," << format_real(x);
    out << "," << format_real(rep.residuals[i]);
    if (stability) {
      const StabilityReport& sr = (*stability)[i];
      out << "," << to_string(sr.classification) << "," << join_reals(sr.predicted.sorted_values())
          << "," << join_reals(sr.computed.eigenvalues) << "," << format_real(sr.spectrum_error);
    }
    out << "\n";
  }
  return out.str();
}

inline std::string enumeration_to_table(const EnumerationReport& rep, const OrthoDiagDecomp& d,
                                        const std::vector<StabilityReport>* stability = nullptr) {
  std::ostringstream out;
  out << "order " << d.order << "  dim " << d.dim << "  rank " << d.rank << "\n";
  out << "classes: real " << rep.real_class_count << "  complex " << rep.complex_class_count
      << "  bound " << rep.bound << "  max residual " << format_real(rep.max_residual) << "\n\n";
  out << "  k  indices      signs        lambda";
  if (stability) out << "  classification";
  out << "\n";
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const Eigenpair& p = rep.pairs[i];
    std::vector<int> one_based(p.selection.indices);
    for (int& x : one_based) ++x;
    char lambda_buf[32];
    std::snprintf(lambda_buf, sizeof lambda_buf, "%12.6f", p.eigenvalue);
    std::string idx = join_ints(one_based, ',');
    std::string sgn;
    for (int s : p.sign_pattern) sgn += s > 0 ? '+' : '-';
    out << "  " << p.selection.k() << "  " << idx;
    for (std::size_t pad = idx.size(); pad < 11; ++pad) out << ' ';
    out << "  " << sgn;
    for (std::size_t pad = sgn.size(); pad < 11; ++pad) out << ' ';
    out << lambda_buf;
    if (stability) out << "  " << to_string((*stability)[i].classification);
    out << "\n";
  }
  return out.str();
}

inline json match_to_json(const MatchReport& rep, int restarts, std::uint64_t seed) {
  json discovered = json::array();
  for (const Discovery& f : rep.discovered)
    discovered.push_back(json{{"lambda", f.lambda},
                              {"u", f.u},
                              {"residual", f.residual},
                              {"trace_index", f.trace_index}});
  json matched = json::array();
  for (const MatchEntry& e : rep.matched)
    matched.push_back(
        json{{"discovered", e.discovered}, {"enumerated", e.enumerated}, {"distance", e.distance}});
  int converged = 0;
  for (const IterationTrace& t : rep.traces)
    if (t.converged) ++converged;
  return json{{"schema", schema_version},
              {"kind", "verification"},
              {"restarts", restarts},
              {"seed", seed},
              {"discovered", std::move(discovered)},
              {"matched", std::move(matched)},
              {"unmatched_discovered", rep.unmatched_discovered},
              {"coverage", rep.coverage},
              {"converged_traces", converged}};
}

inline std::string traces_to_csv(const std::vector<IterationTrace>& traces) {
  std::ostringstream out;
  out << "trace,converged,iterates,shift,residual,final_lambda,start,final_u\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const IterationTrace& t = traces[i];
    out << i << "," << (t.converged ? 1 : 0) << "," << t.iterates << "," << format_real(t.shift)
        << "," << format_real(t.residual) << "," << format_real(t.final_lambda) << ","
        << join_reals(t.start_vector) << "," << join_reals(t.final_u) << "\n";
  }
  return out.str();
}

} // namespace odeig::io
