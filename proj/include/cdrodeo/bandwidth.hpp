#pragma once

#include "cdrodeo/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <vector>

namespace cdrodeo {

//! Bandwidth vector constrained to the geometric grid beta^t * h0, t in Z.
//!
//! Components are always recomputed from their integer exponent, so grid
//! membership is exact up to one pow() rounding and never drifts across
//! long runs.
class Bandwidth
{
public:
  Bandwidth(int d, double h0, double beta)
    : exponents_(d, 0)
    , values_(Eigen::VectorXd::Constant(d, h0))
    , h0_(h0)
    , beta_(beta)
  {
    if (d < 1)
      throw InvalidInput("Bandwidth: d must be >= 1");
    if (!(h0 > 0.0))
      throw InvalidInput("Bandwidth: h0 must be positive");
    if (!(beta > 0.0 && beta < 1.0))
      throw InvalidInput("Bandwidth: beta must lie in (0,1)");
  }

  int d() const { return static_cast<int>(exponents_.size()); }
  double h0() const { return h0_; }
  double beta() const { return beta_; }

  double operator[](int k) const { return values_[k]; }
  const Eigen::VectorXd& values() const { return values_; }
  const std::vector<int>& exponents() const { return exponents_; }
  int exponent(int k) const { return exponents_[k]; }

  //! Multiply component k by beta (one Direct step).
  void step_down(int k) { set_exponent(k, exponents_[k] + 1); }

  //! Divide component k by beta (one Reverse step).
  void step_up(int k) { set_exponent(k, exponents_[k] - 1); }

  void set_exponent(int k, int t)
  {
    exponents_[k] = t;
    values_[k] = std::pow(beta_, static_cast<double>(t)) * h0_;
  }

  double product() const { return values_.prod(); }

  double max_over(const std::vector<int>& components) const
  {
    double m = -std::numeric_limits<double>::infinity();
    for (int k : components)
      m = std::max(m, values_[k]);
    return m;
  }

  double max() const { return values_.maxCoeff(); }

private:
  std::vector<int> exponents_;
  Eigen::VectorXd values_;
  double h0_;
  double beta_;
};

} // namespace cdrodeo
