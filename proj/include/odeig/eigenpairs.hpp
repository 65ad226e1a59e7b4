#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "odeig/constants.hpp"
#include "odeig/errors.hpp"
#include "odeig/odt.hpp"
#include "odeig/symtensor.hpp"

namespace odeig {

// Nonempty, strictly increasing subset of decomposition axes (0-based).
struct IndexSelection {
  std::vector<int> indices;

  int k() const { return static_cast<int>(indices.size()); }
};

inline void require_selection(const IndexSelection& sel, int rank, const char* who) {
  if (sel.indices.empty()) throw std::invalid_argument(std::string(who) + ": empty selection");
  for (std::size_t i = 0; i < sel.indices.size(); ++i) {
    if (sel.indices[i] < 0 || sel.indices[i] >= rank)
      throw std::invalid_argument(std::string(who) + ": selection index out of range");
    if (i > 0 && sel.indices[i] <= sel.indices[i - 1])
      throw std::invalid_argument(std::string(who) + ": selection must be strictly increasing");
  }
}

// Mixing coefficients for one selection: raw[i] = sign_i * (1/lambda_i)^{1/(m-2)},
// normalizer = ||raw||_2, coeffs = raw / normalizer.
struct Coefficients {
  Vector raw;
  double normalizer;
  Vector coeffs;
};

struct Eigenpair {
  double eigenvalue;
  Vector eigenvector;
  IndexSelection selection;
  std::vector<int> sign_pattern; // one of {+1,-1} per selected axis; all +1 for odd order
  Coefficients coefficients;
};

struct EnumerationReport {
  std::vector<Eigenpair> pairs;     // sorted by (k, selection lexicographic, sign pattern)
  std::vector<double> residuals;    // |S u^{m-1} - lambda u|_inf against the dense entries
  double max_residual = 0.0;
  std::uint64_t real_class_count = 0;
  std::uint64_t complex_class_count = 0;
  std::uint64_t bound = 0;          // complex count at full rank, the dimension-level cap
};

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, int exp, const char* who) {
  std::uint64_t p = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && p > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error(std::string(who) + ": count exceeds 64-bit range");
    p *= base;
  }
  return p;
}

} // namespace detail

/// Number of eigenvalue classes over C for a rank-r decomposition:
/// ((m-1)^r - 1) / (m-2).
inline std::uint64_t count_complex_classes(int order, int rank) {
  if (order < 3) throw std::invalid_argument("count_complex_classes: order must be at least 3");
  if (rank < 1) throw std::invalid_argument("count_complex_classes: rank must be positive");
  std::uint64_t p = detail::checked_pow(static_cast<std::uint64_t>(order - 1), rank,
                                        "count_complex_classes");
  return (p - 1) / static_cast<std::uint64_t>(order - 2);
}

/// The same count at rank = dim, which caps every decomposition in R^n.
inline std::uint64_t theoretical_bound(int order, int dim) {
  if (dim < 1) throw std::invalid_argument("theoretical_bound: dimension must be positive");
  return count_complex_classes(order, dim);
}

/// Number of real classes: each selected axis contributes one admissible
/// coefficient for odd order and two signed ones for even order, and for
/// even order (lambda, u) and (lambda, -u) fall in the same class. Hence
/// 2^r - 1 for odd order and (3^r - 1) / 2 for even.
inline std::uint64_t count_real_classes(int order, int rank) {
  if (order < 3) throw std::invalid_argument("count_real_classes: order must be at least 3");
  if (rank < 1) throw std::invalid_argument("count_real_classes: rank must be positive");
  if (order % 2 == 1)
    return detail::checked_pow(2, rank, "count_real_classes") - 1;
  return (detail::checked_pow(3, rank, "count_real_classes") - 1) / 2;
}

/// Coefficients of the eigenvector supported on `sel`. `sign_pattern` must be
/// empty (all positive) or hold +-1 per selected axis; for odd order only the
/// all-positive pattern is admissible.
inline Coefficients coefficients_for(const IndexSelection& sel, const Vector& lambdas, int order,
                                     const std::vector<int>& sign_pattern = {}) {
  if (order < 3) throw std::invalid_argument("coefficients_for: order must be at least 3");
  require_selection(sel, static_cast<int>(lambdas.size()), "coefficients_for");
  for (int idx : sel.indices)
    if (!(lambdas[idx] > 0.0))
      throw std::invalid_argument("coefficients_for: weights must be positive");
  std::size_t k = sel.indices.size();
  if (!sign_pattern.empty() && sign_pattern.size() != k)
    throw std::invalid_argument("coefficients_for: sign pattern length must match selection");
  for (int s : sign_pattern)
    if (s != 1 && s != -1)
      throw std::invalid_argument("coefficients_for: sign pattern entries must be +-1");
  if (order % 2 == 1)
    for (int s : sign_pattern)
      if (s == -1)
        throw std::invalid_argument("coefficients_for: negative signs require even order");

  Coefficients c;
  c.raw.resize(k);
  double sq = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double mag = std::pow(1.0 / lambdas[sel.indices[i]], 1.0 / static_cast<double>(order - 2));
    double sgn = sign_pattern.empty() ? 1.0 : static_cast<double>(sign_pattern[i]);
    c.raw[i] = sgn * mag;
    sq += mag * mag;
  }
  c.normalizer = std::sqrt(sq);
  c.coeffs.resize(k);
  for (std::size_t i = 0; i < k; ++i) c.coeffs[i] = c.raw[i] / c.normalizer;
  return c;
}

/// Builds the eigenpair for one selection and sign pattern:
/// u = sum_i coeffs[i] * u_{A(i)}, lambda = normalizer^{-(m-2)}.
inline Eigenpair assemble_eigenpair(const OrthoDiagDecomp& d, const IndexSelection& sel,
                                    const std::vector<int>& sign_pattern = {}) {
  require_valid(d, "assemble_eigenpair");
  Coefficients c = coefficients_for(sel, d.lambdas, d.order, sign_pattern);

  Vector u(d.dim, 0.0);
  for (std::size_t i = 0; i < sel.indices.size(); ++i) {
    int col = sel.indices[i];
    for (int row = 0; row < d.dim; ++row) u[row] += c.coeffs[i] * d.u_matrix(row, col);
  }
  double lambda = 1.0 / std::pow(c.normalizer, static_cast<double>(d.order - 2));

  Eigenpair p;
  p.eigenvalue = lambda;
  p.eigenvector = std::move(u);
  p.selection = sel;
  p.sign_pattern = sign_pattern.empty() ? std::vector<int>(sel.indices.size(), 1) : sign_pattern;
  p.coefficients = std::move(c);
  return p;
}

/// Enumerates every real eigenpair class of the decomposition: all nonempty
/// axis subsets in lexicographic order within ascending size, and for even
/// order all sign patterns with the first selected sign positive (the class
/// representative), in binary order of the remaining signs. Each pair is
/// checked against the dense tensor; a residual above tol::eigen_residual
/// raises IntegrityError. Rank above 20 must be acknowledged with
/// allow_large, since the class count grows exponentially.
inline EnumerationReport enumerate_real(const OrthoDiagDecomp& d, bool allow_large = false) {
  require_valid(d, "enumerate_real");
  if (d.rank > 20 && !allow_large)
    throw std::invalid_argument(
        "enumerate_real: rank above 20 generates millions of classes; pass allow_large to proceed");

  SymTensor s = materialize(d);
  EnumerationReport report;
  report.complex_class_count = count_complex_classes(d.order, d.rank);
  report.bound = theoretical_bound(d.order, d.dim);

  bool even = d.order % 2 == 0;
  std::vector<int> subset;
  for (int k = 1; k <= d.rank; ++k) {
    subset.resize(k);
    for (int i = 0; i < k; ++i) subset[i] = i;
    for (;;) {
      IndexSelection sel{subset};
      std::uint64_t patterns = even ? detail::checked_pow(2, k - 1, "enumerate_real") : 1;
      for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        std::vector<int> signs(k, 1);
        for (int b = 1; b < k; ++b)
          if (mask >> (b - 1) & 1) signs[b] = -1;
        Eigenpair p = assemble_eigenpair(d, sel, even ? signs : std::vector<int>{});

        Vector g = contract_grad_dense(s, p.eigenvector);
        double res = 0.0;
        for (int i = 0; i < d.dim; ++i)
          res = std::max(res, std::abs(g[i] - p.eigenvalue * p.eigenvector[i]));
        if (res > tol::eigen_residual)
          throw IntegrityError("enumerate_real: closed-form pair fails the dense residual check (" +
                               std::to_string(res) + ")");
        report.pairs.push_back(std::move(p));
        report.residuals.push_back(res);
        report.max_residual = std::max(report.max_residual, res);
      }

      // next k-subset in lexicographic order
      int pos = k - 1;
      while (pos >= 0 && subset[pos] == d.rank - k + pos) --pos;
      if (pos < 0) break;
      ++subset[pos];
      for (int i = pos + 1; i < k; ++i) subset[i] = subset[i - 1] + 1;
    }
  }

  report.real_class_count = report.pairs.size();
  std::uint64_t expected = count_real_classes(d.order, d.rank);
  if (report.real_class_count != expected)
    throw IntegrityError("enumerate_real: produced " + std::to_string(report.real_class_count) +
                         " classes, expected " + std::to_string(expected));
  return report;
}

} // namespace odeig
