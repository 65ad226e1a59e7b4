#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "odeig/eigenpairs.hpp"

using namespace odeig;

namespace {

OrthoDiagDecomp axis_m3() {
  return OrthoDiagDecomp(3, 2, 2, Matrix::identity(2), Vector{2.0, 8.0});
}

OrthoDiagDecomp flat_m4() {
  return OrthoDiagDecomp(4, 2, 2, Matrix::identity(2), Vector{1.0, 1.0});
}

double pair_distance(const Vector& a, const Vector& b, bool modulo_sign) {
  double dp = 0.0, dm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dp += (a[i] - b[i]) * (a[i] - b[i]);
    dm += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return modulo_sign ? std::sqrt(std::min(dp, dm)) : std::sqrt(dp);
}

} // namespace

TEST_CASE("counting formulas", "[eigenpairs]") {
  REQUIRE(count_complex_classes(3, 2) == 3);
  REQUIRE(count_complex_classes(3, 3) == 7);
  REQUIRE(count_complex_classes(4, 2) == 4);
  REQUIRE(count_complex_classes(5, 1) == 1);
  REQUIRE(count_complex_classes(6, 3) == 31);

  REQUIRE(theoretical_bound(3, 4) == 15);
  REQUIRE(theoretical_bound(4, 2) == 4);

  REQUIRE(count_real_classes(3, 2) == 3);
  REQUIRE(count_real_classes(3, 3) == 7);
  REQUIRE(count_real_classes(4, 2) == 4);
  REQUIRE(count_real_classes(4, 3) == 13);
  REQUIRE(count_real_classes(5, 2) == 3);
  REQUIRE(count_real_classes(6, 2) == 4);

  REQUIRE_THROWS_AS(count_complex_classes(2, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(count_complex_classes(3, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(count_complex_classes(6, 30), std::overflow_error);
  REQUIRE_THROWS_AS(count_real_classes(3, 64), std::overflow_error);
  REQUIRE(count_real_classes(3, 63) == (std::uint64_t{1} << 63) - 1);
}

TEST_CASE("coefficients_for matches the closed form", "[eigenpairs]") {
  IndexSelection both{{0, 1}};
  Coefficients c = coefficients_for(both, Vector{2.0, 8.0}, 3);
  REQUIRE(std::abs(c.raw[0] - 0.5) < 1e-15);
  REQUIRE(std::abs(c.raw[1] - 0.125) < 1e-15);
  REQUIRE(std::abs(c.normalizer - 0.5153882032022076) < 1e-15);
  REQUIRE(std::abs(c.coeffs[0] - 0.9701425001453319) < 1e-15);
  REQUIRE(std::abs(c.coeffs[1] - 0.24253562503633297) < 1e-15);

  IndexSelection first{{0}};
  Coefficients c1 = coefficients_for(first, Vector{2.0, 8.0}, 3);
  REQUIRE(std::abs(c1.normalizer - 0.5) < 1e-15);
  REQUIRE(c1.coeffs[0] == 1.0);
}

TEST_CASE("coefficients_for validates selection and signs", "[eigenpairs]") {
  Vector l{2.0, 8.0};
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{}}, l, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{0, 0}}, l, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{1, 0}}, l, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{2}}, l, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{0}}, l, 3, {-1}), std::invalid_argument);
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{0, 1}}, l, 4, {1}), std::invalid_argument);
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{0, 1}}, l, 4, {1, 2}), std::invalid_argument);
  REQUIRE_THROWS_AS(coefficients_for(IndexSelection{{0}}, Vector{-1.0}, 3), std::invalid_argument);
  REQUIRE_NOTHROW(coefficients_for(IndexSelection{{0, 1}}, l, 4, {1, -1}));
}

TEST_CASE("assemble_eigenpair reproduces the known pairs", "[eigenpairs]") {
  OrthoDiagDecomp d = axis_m3();

  Eigenpair p0 = assemble_eigenpair(d, IndexSelection{{0}});
  REQUIRE(std::abs(p0.eigenvalue - 2.0) < 1e-15);
  REQUIRE(std::abs(p0.eigenvector[0] - 1.0) < 1e-15);
  REQUIRE(std::abs(p0.eigenvector[1]) < 1e-15);

  Eigenpair p01 = assemble_eigenpair(d, IndexSelection{{0, 1}});
  REQUIRE(std::abs(p01.eigenvalue - 1.9402850002906638) < 1e-15);
  REQUIRE(std::abs(p01.eigenvector[0] - 0.9701425001453319) < 1e-15);
  REQUIRE(std::abs(p01.eigenvector[1] - 0.24253562503633297) < 1e-15);
  REQUIRE(std::abs(norm2(p01.eigenvector) - 1.0) < tol::unit_norm);

  OrthoDiagDecomp f = flat_m4();
  Eigenpair q = assemble_eigenpair(f, IndexSelection{{0, 1}}, {1, -1});
  REQUIRE(std::abs(q.eigenvalue - 0.5) < 1e-15);
  REQUIRE(std::abs(q.eigenvector[0] - 0.7071067811865475) < 1e-15);
  REQUIRE(std::abs(q.eigenvector[1] + 0.7071067811865475) < 1e-15);
}

TEST_CASE("eigenvalue scales with the weights it mixes", "[eigenpairs]") {
  // With one axis selected the eigenvalue is that axis weight itself.
  OrthoDiagDecomp d = random_decomp(4, 3, 5, {0.5, 10.0}, 17);
  for (int i = 0; i < d.rank; ++i) {
    Eigenpair p = assemble_eigenpair(d, IndexSelection{{i}});
    REQUIRE(std::abs(p.eigenvalue - d.lambdas[i]) < 1e-12);
  }
}

TEST_CASE("enumerate_real lists the axis cubic classes in order", "[eigenpairs]") {
  EnumerationReport rep = enumerate_real(axis_m3());
  REQUIRE(rep.pairs.size() == 3);
  REQUIRE(rep.real_class_count == 3);
  REQUIRE(rep.complex_class_count == 3);
  REQUIRE(rep.bound == 3);
  REQUIRE(rep.max_residual <= tol::eigen_residual);

  REQUIRE(rep.pairs[0].selection.indices == std::vector<int>{0});
  REQUIRE(rep.pairs[1].selection.indices == std::vector<int>{1});
  REQUIRE(rep.pairs[2].selection.indices == std::vector<int>{0, 1});
  REQUIRE(std::abs(rep.pairs[0].eigenvalue - 2.0) < 1e-15);
  REQUIRE(std::abs(rep.pairs[1].eigenvalue - 8.0) < 1e-15);
  REQUIRE(std::abs(rep.pairs[2].eigenvalue - 1.9402850002906638) < 1e-15);
}

TEST_CASE("enumerate_real emits canonical sign patterns in binary order", "[eigenpairs]") {
  OrthoDiagDecomp d(4, 3, 3, Matrix::identity(3), Vector{1.0, 2.0, 4.0});
  EnumerationReport rep = enumerate_real(d);
  REQUIRE(rep.pairs.size() == 13);

  // k=1 singles, then pairs with (+,+),(+,-), then the triple with
  // the two free signs counting up in binary.
  REQUIRE(rep.pairs[3].selection.indices == std::vector<int>{0, 1});
  REQUIRE(rep.pairs[3].sign_pattern == std::vector<int>{1, 1});
  REQUIRE(rep.pairs[4].sign_pattern == std::vector<int>{1, -1});
  REQUIRE(rep.pairs[5].selection.indices == std::vector<int>{0, 2});
  REQUIRE(rep.pairs[7].selection.indices == std::vector<int>{1, 2});
  REQUIRE(rep.pairs[9].selection.indices == std::vector<int>{0, 1, 2});
  REQUIRE(rep.pairs[9].sign_pattern == std::vector<int>{1, 1, 1});
  REQUIRE(rep.pairs[10].sign_pattern == std::vector<int>{1, -1, 1});
  REQUIRE(rep.pairs[11].sign_pattern == std::vector<int>{1, 1, -1});
  REQUIRE(rep.pairs[12].sign_pattern == std::vector<int>{1, -1, -1});

  for (const Eigenpair& p : rep.pairs) REQUIRE(p.sign_pattern.front() == 1);
}

TEST_CASE("every signed assembly lands in exactly one canonical class", "[eigenpairs]") {
  OrthoDiagDecomp d = random_decomp(3, 3, 4, {0.5, 4.0}, 23);
  EnumerationReport rep = enumerate_real(d);
  REQUIRE(rep.pairs.size() == 13);

  std::vector<int> hits(rep.pairs.size(), 0);
  std::vector<int> subset;
  for (int k = 1; k <= 3; ++k) {
    subset.resize(k);
    for (int i = 0; i < k; ++i) subset[i] = i;
    for (;;) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        std::vector<int> signs(k);
        for (int b = 0; b < k; ++b) signs[b] = (mask >> b & 1) ? -1 : 1;
        Eigenpair p = assemble_eigenpair(d, IndexSelection{subset}, signs);
        int found = -1;
        for (std::size_t j = 0; j < rep.pairs.size(); ++j) {
          if (std::abs(p.eigenvalue - rep.pairs[j].eigenvalue) < 1e-12 &&
              pair_distance(p.eigenvector, rep.pairs[j].eigenvector, true) < 1e-12) {
            REQUIRE(found == -1);
            found = static_cast<int>(j);
          }
        }
        REQUIRE(found >= 0);
        ++hits[found];
      }
      int pos = k - 1;
      while (pos >= 0 && subset[pos] == 3 - k + pos) --pos;
      if (pos < 0) break;
      ++subset[pos];
      for (int i = pos + 1; i < k; ++i) subset[i] = subset[i - 1] + 1;
    }
  }
  // Each class absorbs its representative and the mirrored pattern.
  for (int h : hits) REQUIRE(h == 2);
}

TEST_CASE("enumerated pairs satisfy the defining identities", "[eigenpairs]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng pick(500 + seed);
    int n = 2 + static_cast<int>(pick.uniform_int(4));
    int r = 1 + static_cast<int>(pick.uniform_int(n));
    int m = 3 + static_cast<int>(pick.uniform_int(4));
    OrthoDiagDecomp d = random_decomp(n, r, m, {0.5, 10.0}, 600 + seed);
    EnumerationReport rep = enumerate_real(d);

    INFO("seed " << seed << " m " << m << " n " << n << " r " << r);
    REQUIRE(rep.real_class_count == count_real_classes(m, r));
    REQUIRE(rep.complex_class_count == count_complex_classes(m, r));
    REQUIRE(rep.real_class_count <= rep.complex_class_count);
    REQUIRE(rep.complex_class_count <= rep.bound);
    REQUIRE(rep.max_residual <= tol::eigen_residual);

    for (const Eigenpair& p : rep.pairs) {
      REQUIRE(p.eigenvalue > 0.0);
      REQUIRE(std::abs(norm2(p.eigenvector) - 1.0) < tol::unit_norm);
      // lambda_i c_i^{m-2} equals the eigenvalue on every selected axis.
      for (std::size_t i = 0; i < p.selection.indices.size(); ++i) {
        double li = d.lambdas[p.selection.indices[i]];
        double ci = p.coefficients.coeffs[i];
        REQUIRE(std::abs(li * std::pow(ci, m - 2) - p.eigenvalue) < 1e-10);
      }
    }

    // Distinct classes stay numerically apart.
    bool even = m % 2 == 0;
    for (std::size_t a = 0; a < rep.pairs.size(); ++a)
      for (std::size_t b = a + 1; b < rep.pairs.size(); ++b) {
        double du = pair_distance(rep.pairs[a].eigenvector, rep.pairs[b].eigenvector, even);
        double dl = std::abs(rep.pairs[a].eigenvalue - rep.pairs[b].eigenvalue);
        REQUIRE(du + dl > 1e-6);
      }
  }
}

TEST_CASE("nested selections order eigenvalues on flat spectra", "[eigenpairs]") {
  // With all lambda_i equal the eigenvalue shrinks as the selection grows,
  // so A inside A' forces lambda(A') <= lambda(A).
  for (int m : {3, 4}) {
    OrthoDiagDecomp d = random_decomp(4, 4, m, {3.0, 3.0}, 77);
    EnumerationReport rep = enumerate_real(d);
    for (const Eigenpair& p : rep.pairs) {
      double k = static_cast<double>(p.selection.k());
      double expect = 3.0 / std::pow(k, 0.5 * (m - 2));
      REQUIRE(std::abs(p.eigenvalue - expect) < 1e-12);
    }
    for (const Eigenpair& a : rep.pairs)
      for (const Eigenpair& b : rep.pairs) {
        const std::vector<int>& ia = a.selection.indices;
        const std::vector<int>& ib = b.selection.indices;
        if (std::includes(ib.begin(), ib.end(), ia.begin(), ia.end()))
          REQUIRE(b.eigenvalue <= a.eigenvalue + 1e-12);
      }
  }
}

TEST_CASE("enumerate_real guards huge ranks", "[eigenpairs]") {
  OrthoDiagDecomp d = random_decomp(21, 21, 3, {0.5, 2.0}, 5);
  REQUIRE_THROWS_AS(enumerate_real(d), std::invalid_argument);
}

TEST_CASE("enumerate_real refuses invalid decompositions", "[eigenpairs]") {
  OrthoDiagDecomp d(3, 2, 2, Matrix::identity(2), Vector{2.0, -8.0});
  REQUIRE_THROWS_AS(enumerate_real(d), std::invalid_argument);
}
