#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mixstable/error.hpp"

namespace mixstable {

/// Immutable positive definite matrix with its cached lower Cholesky factor.
/// Safe to share across threads after construction.
class SpdMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  explicit SpdMatrix(const Eigen::MatrixXd& entries) : entries_(entries) {
    if (entries.rows() != entries.cols() || entries.rows() == 0)
      throw ShapeError("covariance matrix must be square and non-empty");
    const double scale = entries.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) throw ShapeError("covariance matrix has non-finite entries");
    if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * std::max(scale, 1e-300))
      throw ShapeError("covariance matrix is not symmetric");
    // Cholesky without pivoting; a non-positive pivot means not positive definite.
    Eigen::LLT<Eigen::MatrixXd> llt(entries_);
    if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("covariance matrix is not positive definite");
    factor_ = llt.matrixL();
    if (!(factor_.diagonal().array() > 0.0).all())
      throw NotPositiveDefiniteError("covariance matrix is not positive definite");
  }

  /// Row-major construction from nested rows.
  static SpdMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != r)
        throw ShapeError("covariance matrix must be square");
      for (Eigen::Index j = 0; j < r; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return SpdMatrix(m);
  }

  static SpdMatrix identity(std::size_t dim) {
    return SpdMatrix(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
  }

  static SpdMatrix diagonal(std::span<const double> diag) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
    return SpdMatrix(m);
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// t' Sigma t.
  double quadratic_form(std::span<const double> t) const {
    if (t.size() != dim()) throw DimensionMismatchError("argument dimension does not match the matrix");
    double q = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) q += t[i] * (*this)(i, j) * t[j];
    return q;
  }

  /// out = A z with A the lower factor.
  void apply_factor(std::span<const double> z, std::span<double> out) const noexcept {
    const std::size_t r = dim();
    for (std::size_t i = 0; i < r; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j)
        acc += factor_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
      out[i] = acc;
    }
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < dim(); ++i) {
      s += i ? ";" : "";
      for (std::size_t j = 0; j < dim(); ++j) {
        s += j ? "," : "";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", (*this)(i, j));
        s += buf;
      }
    }
    return s + "]";
  }

 private:
  Eigen::MatrixXd entries_;
  Eigen::MatrixXd factor_;
};

inline SpdMatrix make_spd(const std::vector<std::vector<double>>& rows) { return SpdMatrix::from_rows(rows); }

}  // namespace mixstable
