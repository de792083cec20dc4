#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace xlag {

using Vec = std::vector<double>;

/// Dense real matrix, row-major storage. Entries are required to be finite;
/// constructors and mutators validate on the way in.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols);  // zero-filled
  Mat(int rows, int cols, std::vector<double> entries);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(int n);
  static Mat diagonal(std::span<const double> d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double operator()(int i, int j) const { return entries_[static_cast<size_t>(i) * cols_ + j]; }
  double& operator()(int i, int j) { return entries_[static_cast<size_t>(i) * cols_ + j]; }

  std::span<const double> entries() const { return entries_; }

  Mat transpose() const;
  Mat operator*(const Mat& other) const;
  Vec operator*(std::span<const double> v) const;
  Mat operator+(const Mat& other) const;
  Mat operator-(const Mat& other) const;
  Mat scaled(double s) const;

  double frobenius_norm() const;
  double max_abs() const;

  bool same_shape(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> entries_;
};

void to_json(nlohmann::json& j, const Mat& m);
void from_json(const nlohmann::json& j, Mat& m);

// Vector helpers used throughout the small-dimension code paths.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
Vec sub(std::span<const double> a, std::span<const double> b);
Vec add(std::span<const double> a, std::span<const double> b);
Vec scale(std::span<const double> a, double s);

}  // namespace xlag
