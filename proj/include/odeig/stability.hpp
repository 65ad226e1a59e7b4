#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "odeig/constants.hpp"
#include "odeig/eigenpairs.hpp"
#include "odeig/errors.hpp"
#include "odeig/linalg.hpp"
#include "odeig/symtensor.hpp"

namespace odeig {

enum class Classification { IsolatedLocalMax, Saddle, IsolatedLocalMin };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::IsolatedLocalMax: return "isolated-local-max";
    case Classification::Saddle: return "saddle";
    case Classification::IsolatedLocalMin: return "isolated-local-min";
  }
  return "unknown";
}

// Multiset the projected Hessian spectrum must equal for a pair mixing k
// axes in R^n: n-k copies of -lambda, k-1 copies of (m-2)*lambda, one zero.
struct SpectrumPrediction {
  int neg_count = 0;
  int pos_count = 0;
  int zero_count = 1;
  double lambda = 0.0;
  double pos_value = 0.0; // (m-2) * lambda

  Vector sorted_values() const {
    Vector v;
    v.reserve(static_cast<std::size_t>(neg_count + pos_count + zero_count));
    for (int i = 0; i < pos_count; ++i) v.push_back(pos_value);
    for (int i = 0; i < zero_count; ++i) v.push_back(0.0);
    for (int i = 0; i < neg_count; ++i) v.push_back(-lambda);
    return v; // descending, since lambda > 0
  }
};

struct StabilityReport {
  Matrix hessian;
  Matrix projected;
  SymEigResult computed;
  SpectrumPrediction predicted;
  Classification classification;
  double spectrum_error; // max |computed - predicted| over the sorted spectra

  StabilityReport(Matrix h, Matrix p, SymEigResult c, SpectrumPrediction pr,
                  Classification cl, double err)
      : hessian(std::move(h)), projected(std::move(p)), computed(std::move(c)),
        predicted(pr), classification(cl), spectrum_error(err) {}
};

namespace detail {

inline void require_eigenpair(const SymTensor& s, const Eigenpair& p, const char* who) {
  if (static_cast<int>(p.eigenvector.size()) != s.dim())
    throw std::invalid_argument(std::string(who) + ": eigenvector length must match dimension");
  if (std::abs(norm2(p.eigenvector) - 1.0) > tol::orthonormality)
    throw std::invalid_argument(std::string(who) + ": eigenvector is not unit length");
  Vector g = contract_grad_dense(s, p.eigenvector);
  double res = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    res = std::max(res, std::abs(g[i] - p.eigenvalue * p.eigenvector[i]));
  if (res > tol::hessian_residual)
    throw std::invalid_argument(std::string(who) + ": not an eigenpair of this tensor (residual " +
                                std::to_string(res) + ")");
}

} // namespace detail

/// Constrained Hessian at the pair: (m-1) S u^{m-2} - lambda I.
inline Matrix hessian(const SymTensor& s, const Eigenpair& p) {
  detail::require_eigenpair(s, p, "hessian");
  Matrix h = static_cast<double>(s.order() - 1) * contract_hess(s, p.eigenvector);
  for (std::size_t i = 0; i < h.rows(); ++i) h(i, i) -= p.eigenvalue;
  return h;
}

/// Compresses the Hessian onto the tangent space of the sphere at u:
/// (I - u u^T) H (I - u u^T).
inline Matrix projected_hessian(const Matrix& h, const Vector& u) {
  if (h.rows() != h.cols() || h.rows() != u.size())
    throw std::invalid_argument("projected_hessian: shape mismatch");
  Matrix p = projector_complement(u);
  return p * h * p;
}

/// Closed-form spectrum of the projected Hessian.
inline SpectrumPrediction predicted_spectrum(const Eigenpair& p, int order, int dim) {
  int k = p.selection.k();
  if (k < 1 || k > dim)
    throw std::invalid_argument("predicted_spectrum: selection size must lie in [1, dim]");
  if (order < 3) throw std::invalid_argument("predicted_spectrum: order must be at least 3");
  SpectrumPrediction out;
  out.neg_count = dim - k;
  out.pos_count = k - 1;
  out.zero_count = 1;
  out.lambda = p.eigenvalue;
  out.pos_value = static_cast<double>(order - 2) * p.eigenvalue;
  return out;
}

/// Classifies the pair as a constrained stationary point of S u^m on the
/// sphere. Two independent rules must agree: the count k of mixed axes
/// (k = 1 max, k = dim min, otherwise saddle) and the signs of the computed
/// projected-Hessian spectrum. Disagreement, or a spectrum without exactly
/// one near-zero slot, raises IntegrityError.
inline StabilityReport classify(const SymTensor& s, const Eigenpair& p) {
  Matrix h = hessian(s, p);
  Matrix m = projected_hessian(h, p.eigenvector);
  SymEigResult eig = sym_eig(m);
  SpectrumPrediction pred = predicted_spectrum(p, s.order(), s.dim());

  Vector expect = pred.sorted_values();
  double err = 0.0;
  for (std::size_t i = 0; i < expect.size(); ++i)
    err = std::max(err, std::abs(eig.eigenvalues[i] - expect[i]));

  int k = p.selection.k();
  Classification by_k = k == 1 ? Classification::IsolatedLocalMax
                      : k == s.dim() ? Classification::IsolatedLocalMin
                                     : Classification::Saddle;

  double gate = tol::spectrum_match * std::max(1.0, p.eigenvalue);
  int neg = 0, pos = 0, zero = 0;
  for (double w : eig.eigenvalues) {
    if (w < -gate) ++neg;
    else if (w > gate) ++pos;
    else ++zero;
  }
  if (zero != 1)
    throw IntegrityError("classify: projected spectrum has " + std::to_string(zero) +
                         " near-zero slots, expected exactly 1");
  Classification by_signs = pos == 0 ? Classification::IsolatedLocalMax
                          : neg == 0 ? Classification::IsolatedLocalMin
                                     : Classification::Saddle;
  if (by_signs != by_k)
    throw IntegrityError(std::string("classify: axis-count rule says ") + to_string(by_k) +
                         " but the computed spectrum says " + to_string(by_signs));

  return StabilityReport(std::move(h), std::move(m), std::move(eig), pred, by_k, err);
}

/// Cross-checks the projected spectrum a second way: eigenvalues of
/// Q2^T H Q2, where Q2 spans the orthogonal complement of u, together with
/// one appended zero. Returns the largest deviation between the two sorted
/// spectra. Needs dim >= 2 so the complement is nonempty.
inline double verify_projected_spectrum(const SymTensor& s, const Eigenpair& p) {
  if (s.dim() < 2)
    throw std::invalid_argument("verify_projected_spectrum: dimension must be at least 2");
  detail::require_eigenpair(s, p, "verify_projected_spectrum");
  Matrix h = hessian(s, p);

  Matrix u_col(p.eigenvector.size(), 1);
  u_col.set_column(0, normalized(p.eigenvector));
  Matrix q2 = orthonormal_complement(u_col);
  Matrix compressed = transpose(q2) * h * q2;
  Vector side = sym_eig(compressed).eigenvalues;
  side.push_back(0.0);
  std::sort(side.begin(), side.end(), std::greater<double>());

  Vector full = sym_eig(projected_hessian(h, p.eigenvector)).eigenvalues;
  double err = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i)
    err = std::max(err, std::abs(full[i] - side[i]));
  return err;
}

} // namespace odeig
