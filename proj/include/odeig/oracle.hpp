#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "odeig/constants.hpp"
#include "odeig/eigenpairs.hpp"
#include "odeig/errors.hpp"
#include "odeig/odt.hpp"
#include "odeig/rng.hpp"
#include "odeig/symtensor.hpp"

// Verification oracle. Everything here works from the dense tensor entries
// only, never from the decomposition or its rank-one shortcut, so agreement
// with the closed-form enumeration is evidence rather than circularity.

namespace odeig {

struct IterationTrace {
  Vector start_vector;
  double shift = 0.0;
  int iterates = 0;
  double final_lambda = 0.0;
  Vector final_u;
  bool converged = false;
  double residual = 0.0;
  Vector objectives; // S u^m after each update; nondecreasing for a valid shift
};

struct Discovery {
  double lambda = 0.0;
  Vector u;
  double residual = 0.0;
  int trace_index = 0; // first trace that reached this class
};

struct MatchEntry {
  int discovered = 0; // index into MatchReport::discovered
  int enumerated = 0; // index into the enumeration report's pairs
  double distance = 0.0;
};

struct MatchReport {
  std::vector<Discovery> discovered;
  std::vector<MatchEntry> matched;
  std::vector<int> unmatched_discovered;
  double coverage = 0.0; // fraction of single-axis classes that were rediscovered
  std::vector<IterationTrace> traces;
};

/// Runs u <- normalize(S u^{m-1} + shift u) from a unit start until the
/// eigenpair residual drops to tol::power_residual or the iteration budget
/// runs out. With shift > (m-1) * max |spectral content| the objective
/// S u^m is nondecreasing, which the trace records for auditing. Dense
/// contractions only.
inline IterationTrace shifted_power_iterate(const SymTensor& s, const Vector& start, double shift,
                                            int max_iters = tol::power_max_iterations) {
  if (shift < 0.0) throw std::invalid_argument("shifted_power_iterate: shift must be nonnegative");
  if (max_iters < 1) throw std::invalid_argument("shifted_power_iterate: empty iteration budget");
  if (std::abs(norm2(start) - 1.0) > tol::orthonormality)
    throw std::invalid_argument("shifted_power_iterate: start must be a unit vector");

  IterationTrace t;
  t.start_vector = start;
  t.shift = shift;
  Vector u = start;
  for (int it = 0; it <= max_iters; ++it) {
    Vector g = contract_grad_dense(s, u);
    double lambda = dot(g, u);
    double res = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      res = std::max(res, std::abs(g[i] - lambda * u[i]));
    t.iterates = it;
    t.final_lambda = lambda;
    t.final_u = u;
    t.residual = res;
    if (res <= tol::power_residual) {
      t.converged = true;
      return t;
    }
    if (it == max_iters) break;

    for (std::size_t i = 0; i < u.size(); ++i) g[i] += shift * u[i];
    double nrm = norm2(g);
    if (nrm < 1e-300)
      throw ZeroUpdateError("shifted_power_iterate: update vector vanished; restart elsewhere");
    for (auto& x : g) x /= nrm;
    u = g;
    t.objectives.push_back(contract_full_dense(s, u));
  }
  return t;
}

namespace detail {

// Maps a converged pair to its class representative: for odd order a
// negative lambda flips to (-lambda, -u); for even order the vector sign is
// free, so the first significant entry is made positive.
inline void canonicalize_pair(int order, double& lambda, Vector& u) {
  if (order % 2 == 1) {
    if (lambda < 0.0) {
      lambda = -lambda;
      for (auto& x : u) x = -x;
    }
    return;
  }
  for (double x : u) {
    if (std::abs(x) > 1e-8) {
      if (x < 0.0)
        for (auto& y : u) y = -y;
      return;
    }
  }
}

inline double vector_distance(const Vector& a, const Vector& b, bool modulo_sign) {
  double dp = 0.0, dm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dp += (a[i] - b[i]) * (a[i] - b[i]);
    dm += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return std::sqrt(modulo_sign ? std::min(dp, dm) : dp);
}

} // namespace detail

/// Matches deduplicated discoveries against an enumeration report. A
/// discovery matches the closest enumerated pair whose eigenvalue differs by
/// at most match_tol and whose eigenvector (up to overall sign) lies within
/// the same distance. Coverage counts how many single-axis classes were
/// found.
inline MatchReport match_discoveries(std::vector<Discovery> discovered,
                                     const EnumerationReport& rep, int order,
                                     double match_tol = tol::match_distance) {
  if (!(match_tol > 0.0))
    throw std::invalid_argument("match_discoveries: match tolerance must be positive");
  MatchReport out;
  out.discovered = std::move(discovered);

  std::vector<bool> seen(rep.pairs.size(), false);
  for (std::size_t di = 0; di < out.discovered.size(); ++di) {
    const Discovery& d = out.discovered[di];
    int best = -1;
    double best_dist = 0.0;
    for (std::size_t ei = 0; ei < rep.pairs.size(); ++ei) {
      if (std::abs(d.lambda - rep.pairs[ei].eigenvalue) > match_tol) continue;
      double dist = detail::vector_distance(d.u, rep.pairs[ei].eigenvector, true);
      if (dist > match_tol) continue;
      if (best < 0 || dist < best_dist) {
        best = static_cast<int>(ei);
        best_dist = dist;
      }
    }
    if (best < 0) {
      out.unmatched_discovered.push_back(static_cast<int>(di));
    } else {
      out.matched.push_back({static_cast<int>(di), best, best_dist});
      seen[best] = true;
    }
  }

  int singles = 0, singles_seen = 0;
  for (std::size_t ei = 0; ei < rep.pairs.size(); ++ei) {
    if (rep.pairs[ei].selection.k() != 1) continue;
    ++singles;
    if (seen[ei]) ++singles_seen;
  }
  out.coverage = singles == 0 ? 1.0 : static_cast<double>(singles_seen) / singles;
  (void)order;
  return out;
}

/// Independent rediscovery sweep: seeded random unit starts, shifted power
/// iteration against the dense tensor with shift 1 + max lambda, converged
/// results canonicalized and deduplicated by eigenvector distance, then
/// matched against the closed-form enumeration.
inline MatchReport discover(const OrthoDiagDecomp& d, int restarts, std::uint64_t seed,
                            double match_tol = tol::match_distance) {
  if (restarts < 1) throw std::invalid_argument("discover: restarts must be positive");
  require_valid(d, "discover");
  EnumerationReport rep = enumerate_real(d);
  SymTensor s = materialize(d);

  double shift = 1.0 + *std::max_element(d.lambdas.begin(), d.lambdas.end());
  Rng rng(seed);

  std::vector<Discovery> found;
  std::vector<IterationTrace> traces;
  traces.reserve(restarts);
  for (int trial = 0; trial < restarts; ++trial) {
    Vector start = rng.unit_vector(d.dim);
    IterationTrace t;
    try {
      t = shifted_power_iterate(s, start, shift);
    } catch (const ZeroUpdateError&) {
      t.start_vector = start;
      t.shift = shift;
      t.converged = false;
      t.residual = std::numeric_limits<double>::infinity();
    }
    int index = static_cast<int>(traces.size());
    traces.push_back(std::move(t));
    const IterationTrace& trace = traces.back();
    if (!trace.converged) continue;

    double lambda = trace.final_lambda;
    Vector u = trace.final_u;
    detail::canonicalize_pair(d.order, lambda, u);
    bool duplicate = false;
    for (const Discovery& f : found) {
      if (std::abs(f.lambda - lambda) < 1e-5 &&
          detail::vector_distance(f.u, u, d.order % 2 == 0) < 1e-5) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) found.push_back({lambda, std::move(u), trace.residual, index});
  }

  MatchReport out = match_discoveries(std::move(found), rep, d.order, match_tol);
  out.traces = std::move(traces);
  return out;
}

/// Central-difference check of the gradient identity: the derivative of
/// S v^m at u equals m * S u^{m-1}. Returns the largest componentwise gap.
inline double fd_gradient_check(const SymTensor& s, const Vector& u, double step) {
  if (!(step >= 1e-7 && step <= 1e-3))
    throw std::invalid_argument("fd_gradient_check: step must lie in [1e-7, 1e-3]");
  if (static_cast<int>(u.size()) != s.dim())
    throw std::invalid_argument("fd_gradient_check: vector length must match dimension");
  Vector g = contract_grad_dense(s, u);
  double worst = 0.0;
  Vector probe = u;
  for (std::size_t j = 0; j < u.size(); ++j) {
    probe[j] = u[j] + step;
    double fp = contract_full_dense(s, probe);
    probe[j] = u[j] - step;
    double fm = contract_full_dense(s, probe);
    probe[j] = u[j];
    double diff = (fp - fm) / (2.0 * step);
    worst = std::max(worst, std::abs(diff - static_cast<double>(s.order()) * g[j]));
  }
  return worst;
}

/// Second-difference check of the constrained Hessian: the Lagrangian
/// L(v) = S v^m / m - lambda (v^T v - 1) / 2 has Hessian
/// (m-1) S u^{m-2} - lambda I at the pair. Returns the largest entrywise gap.
inline double fd_hessian_check(const SymTensor& s, const Eigenpair& p, double step) {
  if (!(step >= 1e-7 && step <= 1e-3))
    throw std::invalid_argument("fd_hessian_check: step must lie in [1e-7, 1e-3]");
  if (static_cast<int>(p.eigenvector.size()) != s.dim())
    throw std::invalid_argument("fd_hessian_check: eigenvector length must match dimension");

  double m = static_cast<double>(s.order());
  double lambda = p.eigenvalue;
  auto lagrangian = [&](const Vector& v) {
    double vtv = dot(v, v);
    return contract_full_dense(s, v) / m - 0.5 * lambda * (vtv - 1.0);
  };

  std::size_t n = p.eigenvector.size();
  Matrix expected = static_cast<double>(s.order() - 1) * contract_hess_dense(s, p.eigenvector);
  for (std::size_t i = 0; i < n; ++i) expected(i, i) -= lambda;

  double base = lagrangian(p.eigenvector);
  double worst = 0.0;
  Vector v = p.eigenvector;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double fd;
      if (i == j) {
        v[i] = p.eigenvector[i] + step;
        double fp = lagrangian(v);
        v[i] = p.eigenvector[i] - step;
        double fm = lagrangian(v);
        v[i] = p.eigenvector[i];
        fd = (fp - 2.0 * base + fm) / (step * step);
      } else {
        v[i] = p.eigenvector[i] + step;
        v[j] = p.eigenvector[j] + step;
        double fpp = lagrangian(v);
        v[j] = p.eigenvector[j] - step;
        double fpm = lagrangian(v);
        v[i] = p.eigenvector[i] - step;
        double fmm = lagrangian(v);
        v[j] = p.eigenvector[j] + step;
        double fmp = lagrangian(v);
        v[i] = p.eigenvector[i];
        v[j] = p.eigenvector[j];
        fd = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      }
      worst = std::max(worst, std::abs(fd - expected(i, j)));
    }
  }
  return worst;
}

} // namespace odeig
