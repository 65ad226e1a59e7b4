#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "odeig/constants.hpp"
#include "odeig/matrix.hpp"
#include "odeig/rng.hpp"

namespace odeig {

// Weighted sum of symmetric outer powers: sum_t weights[t] * col_t^{o m}.
struct RankOneForm {
  Vector weights;
  Matrix vectors; // one column per term
};

// Symmetric tensor of order m >= 3 over R^n, stored densely as all n^m
// entries in row-major (last index fastest) layout. When the tensor was
// built from a rank-one sum, that form is kept alongside the entries so
// contractions can take an O(r n m) shortcut; the dense entries remain the
// source of truth and every shortcut has a dense twin used for checking.
class SymTensor {
public:
  SymTensor(int order, int dim) : order_(order), dim_(dim) {
    if (order < 3) throw std::invalid_argument("SymTensor: order must be at least 3");
    if (dim < 1) throw std::invalid_argument("SymTensor: dimension must be positive");
    std::size_t count = 1;
    for (int k = 0; k < order; ++k) {
      if (count > std::size_t{100'000'000} / static_cast<std::size_t>(dim))
        throw std::invalid_argument("SymTensor: dense storage would exceed the entry cap");
      count *= static_cast<std::size_t>(dim);
    }
    entries_.assign(count, 0.0);
  }

  static SymTensor from_rank_one_sum(const Vector& weights, const Matrix& vectors, int order) {
    if (weights.size() != vectors.cols())
      throw std::invalid_argument("from_rank_one_sum: one weight per column required");
    SymTensor s(order, static_cast<int>(vectors.rows()));
    std::size_t n = vectors.rows();
    std::vector<double> buf, next;
    for (std::size_t t = 0; t < weights.size(); ++t) {
      Vector col = vectors.column(t);
      buf.assign(1, weights[t]);
      for (int k = 0; k < order; ++k) {
        next.assign(buf.size() * n, 0.0);
        for (std::size_t a = 0; a < buf.size(); ++a)
          for (std::size_t i = 0; i < n; ++i) next[a * n + i] = buf[a] * col[i];
        buf.swap(next);
      }
      for (std::size_t e = 0; e < buf.size(); ++e) s.entries_[e] += buf[e];
    }
    s.rank_one_ = RankOneForm{weights, vectors};
    return s;
  }

  int order() const { return order_; }
  int dim() const { return dim_; }

  const std::vector<double>& entries() const { return entries_; }

  double at(std::span<const int> idx) const { return entries_[flat(idx)]; }

  // Raw single-entry write. Deliberately does not touch the symmetric
  // counterparts or the rank-one form, so it can break both; meant for
  // constructing tensors entry by entry and for corruption tests.
  void set(std::span<const int> idx, double value) {
    entries_[flat(idx)] = value;
    rank_one_.reset();
  }

  bool has_rank_one_form() const { return rank_one_.has_value(); }
  const RankOneForm& rank_one_form() const {
    if (!rank_one_) throw std::logic_error("SymTensor: no rank-one form stored");
    return *rank_one_;
  }

private:
  std::size_t flat(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != order_)
      throw std::invalid_argument("SymTensor: index arity mismatch");
    std::size_t f = 0;
    for (int k = 0; k < order_; ++k) {
      if (idx[k] < 0 || idx[k] >= dim_)
        throw std::invalid_argument("SymTensor: index out of range");
      f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[k]);
    }
    return f;
  }

  int order_;
  int dim_;
  std::vector<double> entries_;
  std::optional<RankOneForm> rank_one_;
};

namespace detail {

// Contracts the trailing `times` modes with u, walking the dense entries.
inline std::vector<double> contract_trailing_dense(const SymTensor& s, const Vector& u, int times) {
  std::size_t n = static_cast<std::size_t>(s.dim());
  if (u.size() != n) throw std::invalid_argument("contract: vector length must match dimension");
  std::vector<double> cur, next;
  const std::vector<double>* src = &s.entries();
  for (int t = 0; t < times; ++t) {
    std::size_t out_len = src->size() / n;
    next.assign(out_len, 0.0);
    for (std::size_t a = 0; a < out_len; ++a) {
      double acc = 0.0;
      const double* row = src->data() + a * n;
      for (std::size_t i = 0; i < n; ++i) acc += row[i] * u[i];
      next[a] = acc;
    }
    cur.swap(next);
    src = &cur;
  }
  return cur;
}

inline Matrix matrix_from_flat(const std::vector<double>& flat, std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = flat[i * n + j];
  return m;
}

} // namespace detail

/// S u^m: full contraction, dense walk only.
inline double contract_full_dense(const SymTensor& s, const Vector& u) {
  return detail::contract_trailing_dense(s, u, s.order())[0];
}

/// S u^{m-1}: gradient-direction contraction, dense walk only.
inline Vector contract_grad_dense(const SymTensor& s, const Vector& u) {
  std::vector<double> flat = detail::contract_trailing_dense(s, u, s.order() - 1);
  return Vector(flat.begin(), flat.end());
}

/// S u^{m-2}: matrix contraction, dense walk only.
inline Matrix contract_hess_dense(const SymTensor& s, const Vector& u) {
  std::vector<double> flat = detail::contract_trailing_dense(s, u, s.order() - 2);
  return detail::matrix_from_flat(flat, static_cast<std::size_t>(s.dim()));
}

/// S u^m. Uses the rank-one form when available, dense entries otherwise.
inline double contract_full(const SymTensor& s, const Vector& u) {
  if (!s.has_rank_one_form()) return contract_full_dense(s, u);
  const RankOneForm& f = s.rank_one_form();
  if (u.size() != f.vectors.rows())
    throw std::invalid_argument("contract: vector length must match dimension");
  double acc = 0.0;
  for (std::size_t t = 0; t < f.weights.size(); ++t) {
    double d = dot(f.vectors.column(t), u);
    acc += f.weights[t] * std::pow(d, s.order());
  }
  return acc;
}

/// S u^{m-1} with the same path selection as contract_full.
inline Vector contract_grad(const SymTensor& s, const Vector& u) {
  if (!s.has_rank_one_form()) return contract_grad_dense(s, u);
  const RankOneForm& f = s.rank_one_form();
  if (u.size() != f.vectors.rows())
    throw std::invalid_argument("contract: vector length must match dimension");
  Vector out(u.size(), 0.0);
  for (std::size_t t = 0; t < f.weights.size(); ++t) {
    Vector col = f.vectors.column(t);
    double w = f.weights[t] * std::pow(dot(col, u), s.order() - 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * col[i];
  }
  return out;
}

/// S u^{m-2} with the same path selection as contract_full.
inline Matrix contract_hess(const SymTensor& s, const Vector& u) {
  if (!s.has_rank_one_form()) return contract_hess_dense(s, u);
  const RankOneForm& f = s.rank_one_form();
  if (u.size() != f.vectors.rows())
    throw std::invalid_argument("contract: vector length must match dimension");
  Matrix out(u.size(), u.size());
  for (std::size_t t = 0; t < f.weights.size(); ++t) {
    Vector col = f.vectors.column(t);
    double w = f.weights[t] * std::pow(dot(col, u), s.order() - 2);
    for (std::size_t i = 0; i < out.rows(); ++i)
      for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += w * col[i] * col[j];
  }
  return out;
}

/// Spot-checks symmetry: `samples` random multi-indices, each compared with
/// a random permutation of itself. True when every probe agrees within
/// tol::symmetry.
inline bool symmetry_check(const SymTensor& s, int samples, std::uint64_t seed = 0x0d51) {
  if (samples < 1) throw std::invalid_argument("symmetry_check: samples must be positive");
  Rng rng(seed);
  int m = s.order();
  std::vector<int> idx(m), perm(m), pidx(m);
  for (int probe = 0; probe < samples; ++probe) {
    for (int k = 0; k < m; ++k) idx[k] = static_cast<int>(rng.uniform_int(s.dim()));
    for (int k = 0; k < m; ++k) perm[k] = k;
    for (int k = m - 1; k > 0; --k)
      std::swap(perm[k], perm[rng.uniform_int(static_cast<std::uint64_t>(k) + 1)]);
    for (int k = 0; k < m; ++k) pidx[k] = idx[perm[k]];
    if (std::abs(s.at(idx) - s.at(pidx)) > tol::symmetry) return false;
  }
  return true;
}

} // namespace odeig
