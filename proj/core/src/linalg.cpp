#include "xlag/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace xlag {

namespace {

void check_small(const Mat& a, const char* op) {
  if (a.rows() > kMaxDim || a.cols() > kMaxDim) {
    throw std::invalid_argument(std::string(op) + ": matrices beyond 16x16 are not supported");
  }
}

Eigen::MatrixXd to_eigen(const Mat& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

Mat from_eigen(const Eigen::MatrixXd& m) {
  Mat r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

// Solves S y = b for symmetric positive definite S, in place of b.
// S is destroyed. Used by the regularized pseudo-inverse iteration only,
// to keep that route independent of the SVD path.
void cholesky_solve(std::vector<double>& s, int n, std::vector<double>& b, int nrhs) {
  // factor S = L L^T, L stored in the lower triangle of s
  for (int j = 0; j < n; ++j) {
    double d = s[j * n + j];
    for (int k = 0; k < j; ++k) d -= s[j * n + k] * s[j * n + k];
    if (d <= 0.0) throw std::runtime_error("pinv_limit: regularized normal matrix not SPD");
    const double ljj = std::sqrt(d);
    s[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double v = s[i * n + j];
      for (int k = 0; k < j; ++k) v -= s[i * n + k] * s[j * n + k];
      s[i * n + j] = v / ljj;
    }
  }
  // forward/back substitution per right-hand side (b is n x nrhs, row-major)
  for (int c = 0; c < nrhs; ++c) {
    for (int i = 0; i < n; ++i) {
      double v = b[i * nrhs + c];
      for (int k = 0; k < i; ++k) v -= s[i * n + k] * b[k * nrhs + c];
      b[i * nrhs + c] = v / s[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = b[i * nrhs + c];
      for (int k = i + 1; k < n; ++k) v -= s[k * n + i] * b[k * nrhs + c];
      b[i * nrhs + c] = v / s[i * n + i];
    }
  }
}

}  // namespace

SvdResult svd(const Mat& a) {
  check_small(a, "svd");
  Eigen::JacobiSVD<Eigen::MatrixXd> dec(to_eigen(a), Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r;
  r.u = from_eigen(dec.matrixU());
  r.v = from_eigen(dec.matrixV());
  const auto& sv = dec.singularValues();
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  return r;
}

double default_rank_tol(const Mat& a) {
  return 1e-10 * std::max(a.rows(), a.cols());
}

Mat pinv_svd(const Mat& a, std::optional<double> rank_tol) {
  check_small(a, "pinv_svd");
  const double tol = rank_tol.value_or(default_rank_tol(a));
  if (tol <= 0.0) throw std::invalid_argument("pinv_svd: rank_tol must be positive");
  const SvdResult dec = svd(a);
  const double sigma_max = dec.singular_values.empty() ? 0.0 : dec.singular_values.front();
  const double cutoff = tol * sigma_max;
  // P = V S^+ U^T
  Mat p(a.cols(), a.rows());
  const int k = static_cast<int>(dec.singular_values.size());
  for (int r = 0; r < k; ++r) {
    const double s = dec.singular_values[r];
    if (s <= cutoff || s == 0.0) continue;
    const double inv = 1.0 / s;
    for (int i = 0; i < a.cols(); ++i)
      for (int j = 0; j < a.rows(); ++j) p(i, j) += inv * dec.v(i, r) * dec.u(j, r);
  }
  return p;
}

std::vector<double> default_pinv_limit_schedule() {
  std::vector<double> h;
  double v = 4.0;
  for (int k = 1; k <= 40; ++k) {
    h.push_back(v);
    v *= 4.0;
  }
  return h;
}

Mat pinv_limit(const Mat& a, std::span<const double> h_schedule, double stop_tol) {
  check_small(a, "pinv_limit");
  if (stop_tol <= 0.0) throw std::invalid_argument("pinv_limit: stop_tol must be positive");
  if (h_schedule.empty()) throw std::invalid_argument("pinv_limit: empty schedule");
  for (size_t i = 0; i + 1 < h_schedule.size(); ++i) {
    if (!(h_schedule[i] > 0.0) || !(h_schedule[i + 1] > h_schedule[i])) {
      throw std::invalid_argument("pinv_limit: schedule must be strictly increasing and positive");
    }
  }
  const int m = a.rows(), n = a.cols();
  const Mat at = a.transpose();
  const Mat ata = at * a;

  Mat prev(n, m);
  bool have_prev = false;
  // For exactly rank-deficient input the stored matrix carries singular values
  // of order machine epsilon, and the successive-iterate gap is V-shaped in h:
  // it decays like 1/h until rounding noise (growing linearly in h) takes
  // over. Track the best iterate so the noise-floor upturn can be detected
  // and the minimum returned instead of running into the divergent regime.
  Mat best(n, m);
  double best_gap = std::numeric_limits<double>::infinity();
  for (double h : h_schedule) {
    // S = A^T A + (1/h) I_n, iterate = S^{-1} A^T
    std::vector<double> s(ata.entries().begin(), ata.entries().end());
    for (int i = 0; i < n; ++i) s[static_cast<size_t>(i) * n + i] += 1.0 / h;
    std::vector<double> rhs(at.entries().begin(), at.entries().end());
    cholesky_solve(s, n, rhs, m);
    Mat iterate(n, m, std::move(rhs));
    if (have_prev) {
      const double gap = (iterate - prev).frobenius_norm();
      if (gap < stop_tol) return iterate;
      if (gap < best_gap) {
        best_gap = gap;
        best = iterate;
      } else if (gap > 4.0 * best_gap &&
                 best_gap <= 1e4 * stop_tol * (1.0 + best.frobenius_norm())) {
        // the gap already reached a small minimum and is rising again, so the
        // iteration is in the rounding-noise regime; return the minimum.
        // A rising gap with a large minimum is the early growth phase of a
        // small singular value instead and the scan continues.
        return best;
      }
    }
    prev = std::move(iterate);
    have_prev = true;
  }
  throw PinvLimitError("pinv_limit: schedule exhausted before convergence", prev, prev);
}

Mat pinv_limit(const Mat& a) {
  return pinv_limit(a, default_pinv_limit_schedule(), 1e-9);
}

double PenroseReport::max_residual() const {
  return std::max(std::max(residual_pap, residual_apa), std::max(residual_pa, residual_ap));
}

PenroseReport verify_penrose(const Mat& a, const Mat& p, double tol) {
  if (p.rows() != a.cols() || p.cols() != a.rows()) {
    throw std::invalid_argument("verify_penrose: p must be cols(a) x rows(a)");
  }
  const Mat ap = a * p;
  const Mat pa = p * a;
  PenroseReport rep;
  rep.residual_pap = (pa * p - p).frobenius_norm();
  rep.residual_apa = (ap * a - a).frobenius_norm();
  rep.residual_pa = (pa - pa.transpose()).frobenius_norm();
  rep.residual_ap = (ap - ap.transpose()).frobenius_norm();
  const double scale_p = 1.0 + p.frobenius_norm();
  const double scale_a = 1.0 + a.frobenius_norm();
  rep.pap_equals_p = rep.residual_pap <= tol * scale_p;
  rep.apa_equals_a = rep.residual_apa <= tol * scale_a;
  rep.pa_symmetric = rep.residual_pa <= tol * (1.0 + pa.frobenius_norm());
  rep.ap_symmetric = rep.residual_ap <= tol * (1.0 + ap.frobenius_norm());
  return rep;
}

double subspace_gap(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_dim != b.ambient_dim) {
    throw std::invalid_argument("subspace_gap: ambient dimensions differ");
  }
  if (a.dim() != b.dim()) return std::numbers::pi / 2.0;
  if (a.dim() == 0) return 0.0;
  // sine of the largest principal angle, via projection residuals; accurate
  // near zero where the cosine formulation loses all precision
  double worst = 0.0;
  auto residual = [](const SubspaceBasis& from, const SubspaceBasis& onto) {
    double w = 0.0;
    for (const Vec& v : from.vectors) {
      Vec r(v.begin(), v.end());
      for (const Vec& b : onto.vectors) {
        const double c = dot(v, b);
        for (size_t k = 0; k < r.size(); ++k) r[k] -= c * b[k];
      }
      w = std::max(w, norm2(r));
    }
    return w;
  };
  worst = std::max(residual(a, b), residual(b, a));
  return std::asin(std::clamp(worst, 0.0, 1.0));
}

PointAlgebra point_algebra(const Mat& a, std::optional<double> rank_tol) {
  check_small(a, "point_algebra");
  const double tol = rank_tol.value_or(default_rank_tol(a));
  if (tol <= 0.0) throw std::invalid_argument("point_algebra: rank_tol must be positive");
  const int m = a.rows(), n = a.cols();
  const SvdResult dec = svd(a);
  const double sigma_max = dec.singular_values.empty() ? 0.0 : dec.singular_values.front();
  const double cutoff = tol * sigma_max;
  int rank = 0;
  for (double s : dec.singular_values) {
    if (s > cutoff && s > 0.0) ++rank;
  }

  PointAlgebra pa;
  pa.c = a;
  pa.c_pinv = pinv_svd(a, tol);
  pa.rank = rank;

  auto column = [](const Mat& mat, int j) {
    Vec v(mat.rows());
    for (int i = 0; i < mat.rows(); ++i) v[i] = mat(i, j);
    return v;
  };

  pa.v_basis.ambient_dim = n;
  pa.n_basis.ambient_dim = n;
  for (int j = 0; j < n; ++j) {
    (j < rank ? pa.v_basis : pa.n_basis).vectors.push_back(column(dec.v, j));
  }
  pa.range_basis.ambient_dim = m;
  pa.range_perp_basis.ambient_dim = m;
  for (int j = 0; j < m; ++j) {
    (j < rank ? pa.range_basis : pa.range_perp_basis).vectors.push_back(column(dec.u, j));
  }
  pa.projector_v = pa.c_pinv * pa.c;

  // Internal consistency: the pseudo-inverse must reproduce the subspace
  // structure. Violations indicate a kernel bug, not bad input.
  constexpr double angle_tol = 1e-8;
  // (i) columns of C_P span the row space of C
  SubspaceBasis pinv_range;
  pinv_range.ambient_dim = n;
  {
    const SvdResult pdec = svd(pa.c_pinv);
    const double pmax = pdec.singular_values.empty() ? 0.0 : pdec.singular_values.front();
    int prank = 0;
    for (double s : pdec.singular_values) {
      if (s > tol * pmax && s > 0.0) ++prank;
    }
    for (int j = 0; j < prank; ++j) pinv_range.vectors.push_back(column(pdec.u, j));
    if (subspace_gap(pinv_range, pa.v_basis) > angle_tol) {
      throw std::logic_error("point_algebra: im(C_P) != V_x");
    }
    // (iii) ker(C_P) orthogonal to im(C)
    for (int j = prank; j < m; ++j) {
      const Vec k = column(pdec.v, j);
      for (const Vec& r : pa.range_basis.vectors) {
        if (std::abs(dot(k, r)) > angle_tol) {
          throw std::logic_error("point_algebra: ker(C_P) not orthogonal to im(C)");
        }
      }
    }
  }
  // (ii) projector splits probe vectors correctly
  for (int probe = 0; probe < n; ++probe) {
    Vec xi(n, 0.0);
    xi[probe] = 1.0;
    const Vec xi_v = pa.projector_v * xi;
    const Vec xi_n = sub(xi, xi_v);
    if (norm2(a * xi_n) > 1e-8 * (1.0 + sigma_max)) {
      throw std::logic_error("point_algebra: xi - projector*xi not in ker(C)");
    }
    // projector*xi must lie in V_x: check orthogonality against the kernel basis
    for (const Vec& k : pa.n_basis.vectors) {
      if (std::abs(dot(xi_v, k)) > 1e-8) {
        throw std::logic_error("point_algebra: projector*xi not in V_x");
      }
    }
  }
  return pa;
}

std::pair<Vec, Vec> split(const PointAlgebra& pa, std::span<const double> xi) {
  const Vec xi_v = pa.projector_v * xi;
  const Vec xi_n = sub(xi, xi_v);
  return {xi_n, xi_v};
}

}  // namespace xlag
