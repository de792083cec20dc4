#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "xlag/linalg.hpp"

using namespace xlag;

namespace {

Mat random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Mat q(n, n);
  for (int j = 0; j < n; ++j) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    for (int k = 0; k < j; ++k) {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += v[i] * q(i, k);
      for (int i = 0; i < n; ++i) v[i] -= c * q(i, k);
    }
    const double nrm = norm2(v);
    if (nrm < 1e-8) {
      --j;
      continue;
    }
    for (int i = 0; i < n; ++i) q(i, j) = v[i] / nrm;
  }
  return q;
}

// random m x n matrix of rank exactly r with nonzero singular values in
// [0.5, 2.5]; the controlled spectrum keeps the two pseudo-inverse routes
// comparable in double precision
Mat random_rank(std::mt19937_64& rng, int m, int n, int r) {
  std::uniform_real_distribution<double> sv(0.5, 2.5);
  const Mat qm = random_orthogonal(rng, m);
  const Mat qn = random_orthogonal(rng, n);
  Mat sigma(m, n);
  for (int i = 0; i < r; ++i) sigma(i, i) = sv(rng);
  return qm * sigma * qn.transpose();
}

const Mat kExampleC{{1.0, 0.0}, {1.0, 0.0}};
const Mat kExampleCP{{0.5, 0.5}, {0.0, 0.0}};

}  // namespace

TEST_CASE("svd of identity, zero and the rank-one example") {
  auto id = svd(Mat::identity(2));
  REQUIRE(id.singular_values.size() == 2);
  CHECK(id.singular_values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.singular_values[1] == doctest::Approx(1.0).epsilon(1e-12));

  auto zero = svd(Mat(2, 3));
  REQUIRE(zero.singular_values.size() == 2);
  CHECK(zero.singular_values[0] == 0.0);
  CHECK(zero.singular_values[1] == 0.0);

  auto r1 = svd(kExampleC);
  CHECK(r1.singular_values[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r1.singular_values[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("svd postconditions on random matrices") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = dim(rng), n = dim(rng);
    std::uniform_int_distribution<int> rr(0, std::min(m, n));
    const Mat a = random_rank(rng, m, n, rr(rng));
    const SvdResult dec = svd(a);

    CHECK((dec.u.transpose() * dec.u - Mat::identity(m)).frobenius_norm() < 1e-10);
    CHECK((dec.v.transpose() * dec.v - Mat::identity(n)).frobenius_norm() < 1e-10);
    for (size_t i = 0; i + 1 < dec.singular_values.size(); ++i) {
      CHECK(dec.singular_values[i] >= dec.singular_values[i + 1]);
    }
    CHECK(dec.singular_values.back() >= 0.0);

    Mat sigma(m, n);
    for (size_t i = 0; i < dec.singular_values.size(); ++i)
      sigma(static_cast<int>(i), static_cast<int>(i)) = dec.singular_values[i];
    const double scale = 1.0 + a.frobenius_norm();
    CHECK((dec.u * sigma * dec.v.transpose() - a).frobenius_norm() < 1e-10 * scale);
  }
}

TEST_CASE("svd rejects oversized and non-finite input") {
  CHECK_THROWS_AS(svd(Mat(17, 3)), std::invalid_argument);
  CHECK_THROWS_AS(Mat({{1.0, std::nan("")}}), std::invalid_argument);
  CHECK_THROWS_AS(Mat({{std::numeric_limits<double>::infinity()}}), std::invalid_argument);
}

TEST_CASE("pinv_svd on the worked examples") {
  CHECK((pinv_svd(Mat::identity(2)) - Mat::identity(2)).frobenius_norm() < 1e-14);
  CHECK((pinv_svd(kExampleC) - kExampleCP).frobenius_norm() < 1e-12);

  std::mt19937_64 rng(11);
  const Mat a = random_rank(rng, 4, 6, 2);
  CHECK((pinv_svd(a) - pinv_limit(a)).frobenius_norm() <
        1e-6 * (1.0 + pinv_svd(a).frobenius_norm()));
}

TEST_CASE("pinv_svd rejects nonpositive rank_tol") {
  CHECK_THROWS_AS(pinv_svd(Mat::identity(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pinv_svd(Mat::identity(2), -1.0), std::invalid_argument);
}

TEST_CASE("pinv_limit on the worked examples") {
  const std::vector<double> schedule{10, 100, 1000, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12};
  CHECK((pinv_limit(Mat::identity(2), schedule, 1e-9) - Mat::identity(2)).frobenius_norm() < 1e-8);
  CHECK((pinv_limit(kExampleC) - kExampleCP).frobenius_norm() < 1e-8);

  const double d[] = {2.0, 1.0, 0.0};
  const Mat diag = Mat::diagonal(d);
  const Mat want = Mat::diagonal(std::vector<double>{0.5, 1.0, 0.0});
  CHECK((pinv_limit(diag) - want).frobenius_norm() < 1e-8);
}

TEST_CASE("pinv_limit result satisfies Penrose within 10*stop_tol") {
  // full column rank keeps the regularized normal matrix nonsingular, the
  // regime where the iteration reaches the stop tolerance cleanly
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat a = random_rank(rng, 5, 3, 3);
    const double stop_tol = 1e-9;
    const Mat p = pinv_limit(a, default_pinv_limit_schedule(), stop_tol);
    const PenroseReport rep = verify_penrose(a, p, 10.0 * stop_tol);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("pinv_limit non-convergence carries the last two iterates") {
  const std::vector<double> short_schedule{1.0, 2.0};
  try {
    pinv_limit(kExampleC, short_schedule, 1e-18);
    FAIL("expected PinvLimitError");
  } catch (const PinvLimitError& e) {
    CHECK(e.last_iterate.rows() == 2);
    CHECK(e.last_iterate.cols() == 2);
  }
}

TEST_CASE("pinv_limit input validation") {
  CHECK_THROWS_AS(pinv_limit(kExampleC, std::vector<double>{}, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(pinv_limit(kExampleC, std::vector<double>{4.0, 2.0}, 1e-9),
                  std::invalid_argument);
  CHECK_THROWS_AS(pinv_limit(kExampleC, std::vector<double>{4.0, 16.0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("verify_penrose accepts true pseudo-inverses and flags impostors") {
  const PenroseReport ok = verify_penrose(Mat::identity(3), Mat::identity(3), 1e-12);
  CHECK(ok.all_pass());
  CHECK(ok.max_residual() == 0.0);

  CHECK(verify_penrose(kExampleC, kExampleCP, 1e-10).all_pass());

  // C = [[2,0],[0,0]] with P = C^T: C^T C C^T = [[8,0],[0,0]] != C^T
  const Mat c{{2.0, 0.0}, {0.0, 0.0}};
  const PenroseReport bad = verify_penrose(c, c.transpose(), 1e-10);
  CHECK_FALSE(bad.pap_equals_p);
  CHECK(bad.residual_pap == doctest::Approx(6.0).epsilon(1e-12));
  CHECK_FALSE(bad.all_pass());

  CHECK_THROWS_AS(verify_penrose(Mat(2, 3), Mat(2, 3), 1e-10), std::invalid_argument);
}

TEST_CASE("point_algebra on the degenerate pair") {
  const PointAlgebra pa = point_algebra(kExampleC);
  CHECK(pa.rank == 1);
  REQUIRE(pa.n_basis.dim() == 1);
  // N_x = span{(0,1)}
  CHECK(std::abs(std::abs(pa.n_basis.vectors[0][1]) - 1.0) < 1e-12);
  CHECK(std::abs(pa.n_basis.vectors[0][0]) < 1e-12);
  // im(C) = span{(1,1)/sqrt(2)}
  REQUIRE(pa.range_basis.dim() == 1);
  const Vec& r = pa.range_basis.vectors[0];
  CHECK(std::abs(std::abs(r[0]) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(r[0] - r[1]) < 1e-12);
  // projector = [[1,0],[0,0]]
  const Mat want{{1.0, 0.0}, {0.0, 0.0}};
  CHECK((pa.projector_v - want).frobenius_norm() < 1e-12);
  CHECK((pa.projector_v - pa.c_pinv * pa.c).frobenius_norm() == 0.0);
}

TEST_CASE("point_algebra on the identity") {
  const PointAlgebra pa = point_algebra(Mat::identity(3));
  CHECK(pa.rank == 3);
  CHECK(pa.n_basis.dim() == 0);
  CHECK(pa.v_basis.dim() == 3);
  CHECK((pa.projector_v - Mat::identity(3)).frobenius_norm() < 1e-12);
}

TEST_CASE("split reproduces the worked decompositions") {
  const PointAlgebra pa = point_algebra(kExampleC);
  const Vec xi{3.0, -2.0};
  auto [xi_n, xi_v] = split(pa, xi);
  CHECK(std::abs(xi_v[0] - 3.0) < 1e-12);
  CHECK(std::abs(xi_v[1]) < 1e-12);
  CHECK(std::abs(xi_n[0]) < 1e-12);
  CHECK(std::abs(xi_n[1] + 2.0) < 1e-12);

  const PointAlgebra id = point_algebra(Mat::identity(2));
  auto [zn, zv] = split(id, xi);
  CHECK(norm2(zn) < 1e-12);
  CHECK(norm2(sub(zv, xi)) < 1e-12);

  const PointAlgebra zero = point_algebra(Mat(2, 2));
  auto [wn, wv] = split(zero, xi);
  CHECK(norm2(wv) < 1e-12);
  CHECK(norm2(sub(wn, xi)) < 1e-12);
}

TEST_CASE("subspace_gap basics") {
  SubspaceBasis ex, ey, exy;
  ex.ambient_dim = ey.ambient_dim = exy.ambient_dim = 2;
  ex.vectors = {{1.0, 0.0}};
  ey.vectors = {{0.0, 1.0}};
  exy.vectors = {{1.0, 0.0}, {0.0, 1.0}};
  CHECK(subspace_gap(ex, ex) == 0.0);
  CHECK(subspace_gap(ex, ey) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  CHECK(subspace_gap(ex, exy) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  const double s = 1.0 / std::sqrt(2.0);
  SubspaceBasis diag;
  diag.ambient_dim = 2;
  diag.vectors = {{s, s}};
  CHECK(subspace_gap(ex, diag) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-10));
}

TEST_CASE("Penrose corpus: 1000 random matrices, all dims and ranks up to 6") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = dim(rng), n = dim(rng);
    std::uniform_int_distribution<int> rr(0, std::min(m, n));
    const Mat a = random_rank(rng, m, n, rr(rng));
    const Mat p = pinv_svd(a);

    CHECK(verify_penrose(a, p, 1e-10).all_pass());

    const Mat q = pinv_limit(a);
    CHECK((p - q).frobenius_norm() <= 1e-6 * (1.0 + p.frobenius_norm()));

    // uniqueness: an independently produced matrix that passes the four
    // identities at 1e-12 must coincide with the SVD route
    if (verify_penrose(a, q, 1e-12).all_pass()) {
      CHECK((p - q).frobenius_norm() <= 1e-8);
    }
  }
}

TEST_CASE("subspace identities on the random corpus") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = dim(rng), n = dim(rng);
    std::uniform_int_distribution<int> rr(0, std::min(m, n));
    const Mat a = random_rank(rng, m, n, rr(rng));
    // the internal subspace assertions of point_algebra throw on violation
    const PointAlgebra pa = point_algebra(a);
    CHECK(pa.n_basis.dim() + pa.v_basis.dim() == n);
    CHECK(pa.rank == pa.v_basis.dim());
    CHECK(pa.rank == pa.range_basis.dim());
    CHECK((pa.projector_v * pa.projector_v - pa.projector_v).frobenius_norm() < 1e-10);
    // orthonormality of the emitted bases
    for (const auto* basis : {&pa.n_basis, &pa.v_basis, &pa.range_basis, &pa.range_perp_basis}) {
      for (size_t i = 0; i < basis->vectors.size(); ++i) {
        CHECK(std::abs(norm2(basis->vectors[i]) - 1.0) < 1e-12);
        for (size_t j = i + 1; j < basis->vectors.size(); ++j) {
          CHECK(std::abs(dot(basis->vectors[i], basis->vectors[j])) < 1e-12);
        }
      }
    }
  }
}
