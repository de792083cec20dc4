#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "xlag/matrix.hpp"

namespace xlag {

// Dense kernels for the small coefficient matrices C(x). Everything here is a
// pure function of its arguments; matrices beyond 16x16 are rejected.
inline constexpr int kMaxDim = 16;

struct SvdResult {
  Mat u;                               // rows x rows, orthogonal
  std::vector<double> singular_values; // min(rows, cols), non-increasing
  Mat v;                               // cols x cols, orthogonal
};

SvdResult svd(const Mat& a);

/// Default relative threshold below which singular values count as zero.
double default_rank_tol(const Mat& a);

/// Pseudo-inverse via SVD with hard thresholding of small singular values.
Mat pinv_svd(const Mat& a, std::optional<double> rank_tol = std::nullopt);

/// Thrown when the regularized-inverse iteration runs out of schedule.
struct PinvLimitError : std::runtime_error {
  PinvLimitError(std::string msg, Mat last, Mat previous)
      : std::runtime_error(std::move(msg)), last_iterate(std::move(last)),
        previous_iterate(std::move(previous)) {}
  Mat last_iterate;
  Mat previous_iterate;
};

std::vector<double> default_pinv_limit_schedule();  // 4^k, k = 1..40

/// Pseudo-inverse as the limit of (A^T A + I/h)^{-1} A^T along an increasing
/// h schedule. Independent of the SVD route; the inner solves use a plain
/// Cholesky factorization.
Mat pinv_limit(const Mat& a, std::span<const double> h_schedule, double stop_tol);
Mat pinv_limit(const Mat& a);  // default schedule, stop_tol 1e-9

struct PenroseReport {
  bool pap_equals_p = false;   // P A P = P
  bool apa_equals_a = false;   // A P A = A
  bool pa_symmetric = false;   // (P A)^T = P A
  bool ap_symmetric = false;   // (A P)^T = A P
  double residual_pap = 0.0;   // Frobenius norms of the defects
  double residual_apa = 0.0;
  double residual_pa = 0.0;
  double residual_ap = 0.0;
  bool all_pass() const {
    return pap_equals_p && apa_equals_a && pa_symmetric && ap_symmetric;
  }
  double max_residual() const;
};

PenroseReport verify_penrose(const Mat& a, const Mat& p, double tol);

struct SubspaceBasis {
  int ambient_dim = 0;
  std::vector<Vec> vectors;  // orthonormal
  int dim() const { return static_cast<int>(vectors.size()); }
};

/// Largest principal angle (radians) between the spans of two orthonormal
/// bases; 0 when they span the same subspace.
double subspace_gap(const SubspaceBasis& a, const SubspaceBasis& b);

/// Everything the pointwise theory needs about one coefficient matrix:
/// pseudo-inverse, kernel/row-space split of R^n, range split of R^m, and
/// the projector onto the row space.
struct PointAlgebra {
  Mat c;                        // m x n
  Mat c_pinv;                   // n x m
  SubspaceBasis n_basis;        // ker C, in R^n
  SubspaceBasis v_basis;        // row space of C, in R^n
  SubspaceBasis range_basis;    // im C, in R^m
  SubspaceBasis range_perp_basis;
  Mat projector_v;              // n x n, equals c_pinv * c
  int rank = 0;
};

PointAlgebra point_algebra(const Mat& a, std::optional<double> rank_tol = std::nullopt);

/// Direct-sum split xi = xi_N + xi_V with xi_V = projector_v * xi.
std::pair<Vec, Vec> split(const PointAlgebra& pa, std::span<const double> xi);

}  // namespace xlag
