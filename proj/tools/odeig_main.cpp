// Command-line front end: generate decompositions, enumerate and classify
// their eigenpairs, cross-check with power iteration, and print class counts.
//
// Exit codes: 0 success, 1 usage or validation failure, 2 integrity failure
// (redundant computations disagreed), 3 verification shortfall.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odeig/eigenpairs.hpp"
#include "odeig/io.hpp"
#include "odeig/odt.hpp"
#include "odeig/oracle.hpp"
#include "odeig/stability.hpp"

using namespace odeig;
using nlohmann::json;

namespace {

std::string iso_timestamp_utc() {
  std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_flag) {
  if (seed_given) return seed_flag;
  const char* env = std::getenv("ODEIG_SEED");
  if (!env || !*env) return 0;
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0')
    throw std::invalid_argument("ODEIG_SEED must be an unsigned integer, got '" +
                                std::string(env) + "'");
  return v;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    io::write_text(out_path, text);
}

OrthoDiagDecomp load_checked(const std::string& path) {
  OrthoDiagDecomp d = io::load_decomp(path);
  std::vector<Violation> v = validate(d);
  if (!v.empty()) {
    std::string msg = "'" + path + "' holds an invalid decomposition:";
    for (const Violation& x : v) msg += "\n  " + x.invariant;
    throw std::invalid_argument(msg);
  }
  return d;
}

struct ReportFlags {
  std::string in_path;
  std::string out_path;
  std::string format = "json";
  bool no_timestamp = false;
  bool allow_large = false;
};

void add_report_flags(CLI::App* cmd, ReportFlags& f, bool with_allow_large) {
  cmd->add_option("--in", f.in_path, "decomposition JSON file")->required();
  cmd->add_option("--out,-o", f.out_path, "output path (default stdout)");
  cmd->add_option("--format", f.format, "json, csv, or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_flag("--no-timestamp", f.no_timestamp, "omit the generated_at stamp");
  if (with_allow_large)
    cmd->add_flag("--allow-large", f.allow_large, "enumerate ranks above 20 despite the cost");
}

std::string render_report(const EnumerationReport& rep, const OrthoDiagDecomp& d,
                          const std::vector<StabilityReport>* st, const ReportFlags& f) {
  if (f.format == "json") {
    json j = io::enumeration_to_json(rep, d, st);
    if (!f.no_timestamp) j["generated_at"] = iso_timestamp_utc();
    return j.dump(2) + "\n";
  }
  if (f.format == "csv") {
    std::string body = io::enumeration_to_csv(rep, d, st);
    if (!f.no_timestamp) body = "# generated_at " + iso_timestamp_utc() + "\n" + body;
    return body;
  }
  std::string body = io::enumeration_to_table(rep, d, st);
  if (!f.no_timestamp) body += "\ngenerated_at " + iso_timestamp_utc() + "\n";
  return body;
}

int run_gen(int m, int n, int r, bool seed_given, std::uint64_t seed_flag,
            const std::vector<double>& lambdas, double lo, double hi, const std::string& out) {
  if (m < 3) {
    std::cerr << "error: order m must be at least 3\n";
    return 1;
  }
  if (n < 1 || r < 1 || r > n) {
    std::cerr << "error: need 1 <= r <= n\n";
    return 1;
  }
  std::uint64_t seed = resolve_seed(seed_given, seed_flag);
  OrthoDiagDecomp d = random_decomp(n, r, m, {lo, hi}, seed);
  if (!lambdas.empty()) {
    if (lambdas.size() != static_cast<std::size_t>(r))
      throw std::invalid_argument("--lambda needs exactly r values");
    for (double l : lambdas)
      if (!(l > 0.0)) throw std::invalid_argument("--lambda values must be positive");
    d.lambdas = lambdas;
  }
  std::vector<Violation> v = validate(d);
  if (!v.empty()) throw std::invalid_argument("generated decomposition failed validation");
  emit(out, io::decomp_to_json(d).dump(2) + "\n");
  return 0;
}

int run_enumerate(const ReportFlags& f, bool with_stability) {
  OrthoDiagDecomp d = load_checked(f.in_path);
  EnumerationReport rep = enumerate_real(d, f.allow_large);
  std::vector<StabilityReport> st;
  const std::vector<StabilityReport>* stp = nullptr;
  if (with_stability) {
    SymTensor s = materialize(d);
    st.reserve(rep.pairs.size());
    for (const Eigenpair& p : rep.pairs) st.push_back(classify(s, p));
    stp = &st;
  }
  emit(f.out_path, render_report(rep, d, stp, f));
  return 0;
}

int run_verify(const std::string& in_path, int restarts, bool seed_given, std::uint64_t seed_flag,
               const std::string& out, const std::string& dump_path, bool no_timestamp,
               double match_tol) {
  if (restarts < 1) {
    std::cerr << "error: --restarts must be positive\n";
    return 1;
  }
  if (!(match_tol > 0.0)) {
    std::cerr << "error: --match-tol must be positive\n";
    return 1;
  }
  OrthoDiagDecomp d = load_checked(in_path);
  std::uint64_t seed = resolve_seed(seed_given, seed_flag);
  MatchReport rep = discover(d, restarts, seed, match_tol);

  json j = io::match_to_json(rep, restarts, seed);
  if (!no_timestamp) j["generated_at"] = iso_timestamp_utc();
  emit(out, j.dump(2) + "\n");

  if (!dump_path.empty()) io::write_text(dump_path, io::traces_to_csv(rep.traces));

  bool ok = rep.unmatched_discovered.empty() && rep.coverage == 1.0;
  if (!ok) {
    std::string path = dump_path.empty() ? "odeig_traces.csv" : dump_path;
    if (dump_path.empty()) io::write_text(path, io::traces_to_csv(rep.traces));
    std::cerr << "verification shortfall: coverage " << rep.coverage << ", "
              << rep.unmatched_discovered.size() << " unmatched discoveries; traces in " << path
              << "\n";
    return 3;
  }
  return 0;
}

int run_count(int m, int n_opt, int r_opt, const std::string& format) {
  if (m < 3) {
    std::cerr << "error: order m must be at least 3\n";
    return 1;
  }
  if (n_opt < 1 && r_opt < 1) {
    std::cerr << "error: count needs --n or --r\n";
    return 1;
  }
  int n = n_opt >= 1 ? n_opt : r_opt;
  int r = r_opt >= 1 ? r_opt : n_opt;
  if (r > n) {
    std::cerr << "error: need r <= n\n";
    return 1;
  }
  std::uint64_t bound = theoretical_bound(m, n);
  std::uint64_t complex_count = count_complex_classes(m, r);
  std::uint64_t real_count = count_real_classes(m, r);
  if (format == "json") {
    json j{{"schema", io::schema_version}, {"kind", "counts"},      {"order", m},
           {"dim", n},                     {"rank", r},             {"bound", bound},
           {"complex", complex_count},     {"real", real_count}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "order " << m << "  dim " << n << "  rank " << r << "\n"
              << "bound (all classes over C at full rank): " << bound << "\n"
              << "complex classes at rank " << r << ": " << complex_count << "\n"
              << "real classes at rank " << r << ": " << real_count << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthogonally diagonalizable symmetric tensors: exact eigenpair tooling"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random decomposition as JSON");
  int g_m = 3, g_n = 2, g_r = 1;
  std::uint64_t g_seed = 0;
  std::vector<double> g_lambdas;
  double g_lo = 0.5, g_hi = 10.0;
  std::string g_out;
  gen->add_option("--m", g_m, "tensor order (at least 3)")->required();
  gen->add_option("--n", g_n, "ambient dimension")->required();
  gen->add_option("--r", g_r, "number of axes (1..n)")->required();
  auto* g_seed_opt = gen->add_option("--seed", g_seed, "RNG seed (default: ODEIG_SEED or 0)");
  gen->add_option("--lambda", g_lambdas, "explicit positive weights, one per axis")
      ->expected(-1);
  gen->add_option("--lambda-lo", g_lo, "weight range lower end");
  gen->add_option("--lambda-hi", g_hi, "weight range upper end");
  gen->add_option("--out,-o", g_out, "output path (default stdout)");

  // enumerate / classify
  auto* enumerate_cmd = app.add_subcommand("enumerate", "list every real eigenpair class");
  ReportFlags e_flags;
  add_report_flags(enumerate_cmd, e_flags, true);

  auto* classify_cmd =
      app.add_subcommand("classify", "enumerate plus projected-Hessian classification");
  ReportFlags c_flags;
  add_report_flags(classify_cmd, c_flags, true);

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "rediscover the classes by shifted power iteration");
  std::string v_in, v_out, v_dump;
  int v_restarts = 200;
  std::uint64_t v_seed = 0;
  double v_match_tol = tol::match_distance;
  bool v_no_timestamp = false;
  verify_cmd->add_option("--in", v_in, "decomposition JSON file")->required();
  verify_cmd->add_option("--restarts", v_restarts, "random starts (default 200)");
  verify_cmd->add_option("--match-tol", v_match_tol,
                         "eigenvalue/eigenvector match tolerance (default 1e-6)");
  auto* v_seed_opt =
      verify_cmd->add_option("--seed", v_seed, "RNG seed (default: ODEIG_SEED or 0)");
  verify_cmd->add_option("--out,-o", v_out, "report path (default stdout)");
  verify_cmd->add_option("--dump-traces", v_dump, "write per-restart traces to this CSV");
  verify_cmd->add_flag("--no-timestamp", v_no_timestamp, "omit the generated_at stamp");

  // count
  auto* count_cmd = app.add_subcommand("count", "print class counts without enumerating");
  int n_m = 3, n_n = 0, n_r = 0;
  std::string n_format = "table";
  count_cmd->add_option("--m", n_m, "tensor order (at least 3)")->required();
  count_cmd->add_option("--n", n_n, "ambient dimension");
  count_cmd->add_option("--r", n_r, "number of axes (defaults to n)");
  count_cmd->add_option("--format", n_format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed())
      return run_gen(g_m, g_n, g_r, g_seed_opt->count() > 0, g_seed, g_lambdas, g_lo, g_hi, g_out);
    if (enumerate_cmd->parsed()) return run_enumerate(e_flags, false);
    if (classify_cmd->parsed()) return run_enumerate(c_flags, true);
    if (verify_cmd->parsed())
      return run_verify(v_in, v_restarts, v_seed_opt->count() > 0, v_seed, v_out, v_dump,
                        v_no_timestamp, v_match_tol);
    if (count_cmd->parsed()) return run_count(n_m, n_n, n_r, n_format);
  } catch (const IntegrityError& e) {
    std::cerr << "integrity failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
