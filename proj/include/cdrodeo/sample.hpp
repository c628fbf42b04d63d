#pragma once

#include "cdrodeo/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <utility>

namespace cdrodeo {

//! Row-major observation storage: inner loops stream one observation
//! (one row) at a time.
using Matrix =
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

//! Estimation point w = (x, y), length d.
using EvalPoint = Eigen::VectorXd;

//! Observations W_i = (X_i, Y_i): n rows, d = d1 + d2 columns.
//! The first d1 columns are the conditioning variables X (d1 may be 0,
//! which is plain density estimation).
class Sample
{
public:
  Sample(Matrix data, int d1)
    : data_(std::move(data))
    , d1_(d1)
  {
    if (d1_ < 0 || d1_ >= data_.cols())
      throw DimensionMismatch("Sample: need 0 <= d1 < d");
    if (data_.rows() < 1 || data_.cols() < 1)
      throw DimensionMismatch("Sample: need n >= 1 and d >= 1");
    if (!data_.allFinite())
      throw InvalidInput("Sample: data contains NaN/Inf");
  }

  Eigen::Index n() const { return data_.rows(); }
  int d() const { return static_cast<int>(data_.cols()); }
  int d1() const { return d1_; }
  int d2() const { return d() - d1_; }

  const Matrix& data() const { return data_; }
  double operator()(Eigen::Index i, int k) const { return data_(i, k); }

  //! Conditioning part X_i of observation i (first d1 entries).
  Eigen::VectorXd x_row(Eigen::Index i) const
  {
    return data_.row(i).head(d1_).transpose();
  }

private:
  Matrix data_;
  int d1_;
};

//! Precomputed pre-estimator values f~_X(X_i), floored at n^(-1/2) so the
//! lower-bound condition holds by construction for every source.
class MarginalValues
{
public:
  MarginalValues(Vector raw_values, Eigen::Index n)
    : values_(std::move(raw_values))
  {
    if (values_.size() != n)
      throw DimensionMismatch("MarginalValues: need one value per observation");
    const double floor = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (std::isnan(values_[i]))
        throw InvalidInput("MarginalValues: NaN value");
      values_[i] = std::max(values_[i], floor);
    }
  }

  //! Unit marginal for density estimation (d1 = 0).
  static MarginalValues unit(Eigen::Index n)
  {
    return MarginalValues(Vector::Ones(n), n);
  }

  const Vector& values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  Eigen::Index size() const { return values_.size(); }

private:
  Vector values_;
};

} // namespace cdrodeo
