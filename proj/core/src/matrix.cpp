#include "xlag/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace xlag {

namespace {
void check_finite(std::span<const double> entries, const char* what) {
  for (double e : entries) {
    if (!std::isfinite(e)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}
}  // namespace

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("Mat: dimensions must be positive");
  entries_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Mat::Mat(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("Mat: dimensions must be positive");
  if (entries_.size() != static_cast<size_t>(rows) * cols) {
    throw std::invalid_argument("Mat: entry count does not match rows*cols");
  }
  check_finite(entries_, "Mat");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  if (rows_ == 0) throw std::invalid_argument("Mat: empty row list");
  cols_ = static_cast<int>(rows.begin()->size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) {
      throw std::invalid_argument("Mat: ragged row list");
    }
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  check_finite(entries_, "Mat");
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(std::span<const double> d) {
  Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat Mat::operator*(const Mat& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("Mat multiply: shape mismatch");
  Mat r(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < other.cols_; ++j) r(i, j) += a * other(k, j);
    }
  }
  return r;
}

Vec Mat::operator*(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("Mat apply: shape mismatch");
  Vec r(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Mat Mat::operator+(const Mat& other) const {
  if (!same_shape(other)) throw std::invalid_argument("Mat add: shape mismatch");
  Mat r = *this;
  for (size_t i = 0; i < entries_.size(); ++i) r.entries_[i] += other.entries_[i];
  return r;
}

Mat Mat::operator-(const Mat& other) const {
  if (!same_shape(other)) throw std::invalid_argument("Mat subtract: shape mismatch");
  Mat r = *this;
  for (size_t i = 0; i < entries_.size(); ++i) r.entries_[i] -= other.entries_[i];
  return r;
}

Mat Mat::scaled(double s) const {
  Mat r = *this;
  for (double& e : r.entries_) e *= s;
  return r;
}

double Mat::frobenius_norm() const {
  double s = 0.0;
  for (double e : entries_) s += e * e;
  return std::sqrt(s);
}

double Mat::max_abs() const {
  double m = 0.0;
  for (double e : entries_) m = std::max(m, std::abs(e));
  return m;
}

void to_json(nlohmann::json& j, const Mat& m) {
  j = nlohmann::json{{"rows", m.rows()},
                     {"cols", m.cols()},
                     {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

void from_json(const nlohmann::json& j, Mat& m) {
  m = Mat(j.at("rows").get<int>(), j.at("cols").get<int>(),
          j.at("entries").get<std::vector<double>>());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vec sub(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sub: length mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("add: length mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec scale(std::span<const double> a, double s) {
  Vec r(a.begin(), a.end());
  for (double& e : r) e *= s;
  return r;
}

}  // namespace xlag
