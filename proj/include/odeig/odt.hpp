#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "odeig/constants.hpp"
#include "odeig/errors.hpp"
#include "odeig/linalg.hpp"
#include "odeig/matrix.hpp"
#include "odeig/rng.hpp"
#include "odeig/symtensor.hpp"

namespace odeig {

// S = sum_i lambdas[i] * u_i^{o order} with orthonormal columns u_i and
// positive weights. rank counts the columns and never exceeds dim.
struct OrthoDiagDecomp {
  int order = 3;
  int dim = 1;
  int rank = 1;
  Matrix u_matrix;
  Vector lambdas;

  OrthoDiagDecomp(int m, int n, int r, Matrix u, Vector l)
      : order(m), dim(n), rank(r), u_matrix(std::move(u)), lambdas(std::move(l)) {}
};

struct Violation {
  std::string invariant;
  double magnitude;
};

/// Checks every structural invariant and returns one entry per breach;
/// an empty result means the decomposition is usable.
inline std::vector<Violation> validate(const OrthoDiagDecomp& d) {
  std::vector<Violation> out;
  if (d.order < 3) out.push_back({"order must be at least 3", static_cast<double>(d.order)});
  if (d.dim < 1) out.push_back({"dimension must be positive", static_cast<double>(d.dim)});
  if (d.rank < 1) out.push_back({"rank must be positive", static_cast<double>(d.rank)});
  if (d.rank > d.dim)
    out.push_back({"rank must not exceed dimension", static_cast<double>(d.rank - d.dim)});
  if (d.u_matrix.rows() != static_cast<std::size_t>(d.dim) ||
      d.u_matrix.cols() != static_cast<std::size_t>(d.rank)) {
    out.push_back({"u_matrix shape must be dim x rank", 0.0});
    return out; // remaining checks assume consistent shapes
  }
  if (d.lambdas.size() != static_cast<std::size_t>(d.rank)) {
    out.push_back({"lambdas length must equal rank", 0.0});
    return out;
  }
  for (int i = 0; i < d.rank; ++i)
    if (!(d.lambdas[i] > 0.0))
      out.push_back({"lambda " + std::to_string(i + 1) + " must be positive", d.lambdas[i]});
  Matrix g = transpose(d.u_matrix) * d.u_matrix;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  double defect = max_abs(g);
  if (defect > tol::orthonormality) out.push_back({"columns must be orthonormal", defect});
  return out;
}

inline void require_valid(const OrthoDiagDecomp& d, const char* who) {
  std::vector<Violation> v = validate(d);
  if (v.empty()) return;
  std::string msg = std::string(who) + ": invalid decomposition:";
  for (const Violation& x : v) msg += " [" + x.invariant + "]";
  throw std::invalid_argument(msg);
}

/// Draws a random decomposition: a Gaussian n x r matrix orthonormalized by
/// gram_schmidt (retried on rank deficiency, at most ten draws) and weights
/// uniform over lambda_range. Deterministic in the seed.
inline OrthoDiagDecomp random_decomp(int dim, int rank, int order,
                                     std::pair<double, double> lambda_range,
                                     std::uint64_t seed) {
  if (order < 3) throw std::invalid_argument("random_decomp: order must be at least 3");
  if (dim < 1) throw std::invalid_argument("random_decomp: dimension must be positive");
  if (rank < 1 || rank > dim)
    throw std::invalid_argument("random_decomp: rank must lie in [1, dim]");
  if (!(lambda_range.first > 0.0) || !(lambda_range.second >= lambda_range.first))
    throw std::invalid_argument("random_decomp: lambda range must satisfy 0 < lo <= hi");

  Rng rng(seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Matrix draw(dim, rank);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < rank; ++j) draw(i, j) = rng.normal();
    Matrix q(1, 1);
    try {
      q = gram_schmidt(draw);
    } catch (const RankDeficiencyError&) {
      continue;
    }
    Vector lambdas(rank);
    for (auto& l : lambdas) l = rng.uniform(lambda_range.first, lambda_range.second);
    return OrthoDiagDecomp(order, dim, rank, std::move(q), std::move(lambdas));
  }
  throw RankDeficiencyError("random_decomp: ten draws in a row were rank deficient");
}

/// Expands the decomposition into its dense tensor. The result keeps the
/// rank-one form for fast contractions.
inline SymTensor materialize(const OrthoDiagDecomp& d) {
  require_valid(d, "materialize");
  return SymTensor::from_rank_one_sum(d.lambdas, d.u_matrix, d.order);
}

} // namespace odeig
