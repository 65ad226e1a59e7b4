#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "odeig/constants.hpp"
#include "odeig/errors.hpp"
#include "odeig/matrix.hpp"

namespace odeig {

struct SymEigResult {
  Vector eigenvalues;  // descending
  Matrix eigenvectors; // column j pairs with eigenvalues[j]

  SymEigResult(Vector w, Matrix v) : eigenvalues(std::move(w)), eigenvectors(std::move(v)) {}
};

/// Orthonormalizes the columns of `vectors` by modified Gram-Schmidt with a
/// second projection pass per column. Throws RankDeficiencyError when a
/// column's residual norm drops below tol::rank_deficiency.
inline Matrix gram_schmidt(const Matrix& vectors) {
  if (vectors.cols() > vectors.rows())
    throw std::invalid_argument("gram_schmidt: more columns than rows");
  Matrix q(vectors.rows(), vectors.cols());
  for (std::size_t j = 0; j < vectors.cols(); ++j) {
    Vector v = vectors.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        Vector qi = q.column(i);
        double p = dot(qi, v);
        for (std::size_t t = 0; t < v.size(); ++t) v[t] -= p * qi[t];
      }
    }
    double nrm = norm2(v);
    if (nrm < tol::rank_deficiency)
      throw RankDeficiencyError("gram_schmidt: column " + std::to_string(j + 1) +
                                " is numerically dependent (residual " + std::to_string(nrm) + ")");
    for (auto& x : v) x /= nrm;
    q.set_column(j, v);
  }
  return q;
}

inline void require_orthonormal(const Matrix& q, const char* who) {
  Matrix g = transpose(q) * q;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  if (max_abs(g) > tol::orthonormality)
    throw std::invalid_argument(std::string(who) + ": columns are not orthonormal");
}

/// Extends an orthonormal n x r basis (r < n) to the remaining n - r
/// directions by sweeping the canonical basis vectors and skipping the
/// dependent ones. Returned columns are orthonormal and orthogonal to the
/// input basis.
inline Matrix orthonormal_complement(const Matrix& basis) {
  std::size_t n = basis.rows(), r = basis.cols();
  if (r >= n)
    throw std::invalid_argument("orthonormal_complement: basis already spans the space");
  require_orthonormal(basis, "orthonormal_complement");

  std::vector<Vector> accepted;
  for (std::size_t cand = 0; cand < n && accepted.size() < n - r; ++cand) {
    Vector v(n, 0.0);
    v[cand] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < r; ++i) {
        Vector b = basis.column(i);
        double p = dot(b, v);
        for (std::size_t t = 0; t < n; ++t) v[t] -= p * b[t];
      }
      for (const Vector& a : accepted) {
        double p = dot(a, v);
        for (std::size_t t = 0; t < n; ++t) v[t] -= p * a[t];
      }
    }
    double nrm = norm2(v);
    if (nrm < 1e-8) continue;
    for (auto& x : v) x /= nrm;
    accepted.push_back(std::move(v));
  }
  if (accepted.size() != n - r)
    throw RankDeficiencyError("orthonormal_complement: could not complete the basis");
  return Matrix::from_columns(accepted);
}

/// I - u u^T for a unit vector u.
inline Matrix projector_complement(const Vector& u) {
  if (u.empty()) throw std::invalid_argument("projector_complement: empty vector");
  if (std::abs(norm2(u) - 1.0) > tol::orthonormality)
    throw std::invalid_argument("projector_complement: u is not unit length");
  Matrix p = Matrix::identity(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) p(i, j) -= u[i] * u[j];
  return p;
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Sweeps run until the largest off-diagonal magnitude is at most
/// tol::jacobi_offdiag; more than tol::jacobi_max_sweeps sweeps raises
/// ConvergenceError. Eigenvalues come back in descending order.
inline SymEigResult sym_eig(const Matrix& input) {
  std::size_t n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("sym_eig: matrix is not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > tol::orthonormality)
        throw std::invalid_argument("sym_eig: matrix is not symmetric");

  Matrix a = input;
  // Enforce exact symmetry so the sweep updates stay consistent.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = avg;
    }
  Matrix v = Matrix::identity(n);

  auto off_max = [&]() {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
  };

  int sweeps = 0;
  while (off_max() > tol::jacobi_offdiag) {
    if (++sweeps > tol::jacobi_max_sweeps)
      throw ConvergenceError("sym_eig: Jacobi did not converge within sweep budget");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          double aip = a(i, p), aiq = a(i, q);
          a(i, p) = a(p, i) = aip - s * (aiq + tau * aip);
          a(i, q) = a(q, i) = aiq + s * (aip - tau * aiq);
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  Vector w(n);
  Matrix vs(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) vs(i, j) = v(i, order[j]);
  }
  return SymEigResult(std::move(w), std::move(vs));
}

} // namespace odeig
