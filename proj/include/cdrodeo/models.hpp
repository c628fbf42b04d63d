#pragma once

#include "cdrodeo/errors.hpp"
#include "cdrodeo/rng.hpp"
#include "cdrodeo/sample.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

namespace cdrodeo {

//! The three benchmark models. Column order is (X_1..X_d1, Y_1[, Y_2]).
//!
//!  (a) Y2 ~ InvGamma(4,3), Y1|Y2 ~ N(0, Y2), X_j|Y iid N(Y1, Y2); d2 = 2.
//!      Fully relevant: the conditional density of Y given X = x depends
//!      on every coordinate.
//!  (b) X_j iid N(0,1), Y|X ~ N(3 X_1^3, 0.25); d2 = 1. Sparse: only x_1
//!      and y are relevant.
//!  (c) as (b) with X_j iid Uniform[-1,1]; discontinuous at the support
//!      boundary.
enum class Model
{
  a,
  b,
  c
};

inline Model model_by_name(const std::string& name)
{
  if (name == "a")
    return Model::a;
  if (name == "b")
    return Model::b;
  if (name == "c")
    return Model::c;
  throw InvalidInput("unknown model: " + name);
}

inline const char* to_string(Model m)
{
  switch (m) {
    case Model::a: return "a";
    case Model::b: return "b";
    case Model::c: return "c";
  }
  return "?";
}

struct ModelSpec
{
  Model model = Model::b;
  int d1 = 1;
  std::uint64_t seed = 0;

  int d2() const { return model == Model::a ? 2 : 1; }
  int d() const { return d1 + d2(); }

  void validate() const
  {
    if (d1 < 1)
      throw InvalidInput("ModelSpec: d1 must be >= 1");
  }
};

namespace models_detail {

// Fixed uniform-slot budget per observation; keeps per-row draws
// independent of evaluation order.
inline constexpr std::uint64_t kSlotsPerRow = 128;

inline double gamma4_rate1(const CounterRng& rng, std::uint64_t base)
{
  double s = 0.0;
  for (int k = 0; k < 4; ++k)
    s -= std::log(rng.uniform(base + k));
  return s;
}

} // namespace models_detail

//! Draws n observations from the hierarchical model, deterministically in
//! (seed, row index).
inline Sample sample_model(const ModelSpec& spec, Eigen::Index n)
{
  spec.validate();
  if (n < 1)
    throw InvalidInput("sample_model: n must be >= 1");
  const CounterRng rng(spec.seed);
  const int d1 = spec.d1;
  Matrix data(n, spec.d());
  using models_detail::kSlotsPerRow;

  switch (spec.model) {
    case Model::a:
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::uint64_t base = static_cast<std::uint64_t>(i) * kSlotsPerRow;
        const double y2 = 3.0 / models_detail::gamma4_rate1(rng, base);
        const double sd = std::sqrt(y2);
        const double y1 = sd * rng.normal(base + 4);
        for (int j = 0; j < d1; ++j)
          data(i, j) = y1 + sd * rng.normal(base + 6 + 2 * j);
        data(i, d1) = y1;
        data(i, d1 + 1) = y2;
      }
      break;
    case Model::b:
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::uint64_t base = static_cast<std::uint64_t>(i) * kSlotsPerRow;
        for (int j = 0; j < d1; ++j)
          data(i, j) = rng.normal(base + 2 + 2 * j);
        const double x1 = data(i, 0);
        data(i, d1) = 3.0 * x1 * x1 * x1 + 0.5 * rng.normal(base);
      }
      break;
    case Model::c:
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::uint64_t base = static_cast<std::uint64_t>(i) * kSlotsPerRow;
        for (int j = 0; j < d1; ++j)
          data(i, j) = rng.uniform(base + 2 + j, -1.0, 1.0);
        const double x1 = data(i, 0);
        data(i, d1) = 3.0 * x1 * x1 * x1 + 0.5 * rng.normal(base);
      }
      break;
  }
  return Sample(std::move(data), d1);
}

//! Exact conditional density f(x, y) of Y given X = x at w = (x, y).
inline double true_density(const ModelSpec& spec, const EvalPoint& w)
{
  spec.validate();
  if (w.size() != spec.d())
    throw DimensionMismatch("true_density: point dimension mismatch");
  const int d1 = spec.d1;

  switch (spec.model) {
    case Model::b:
    case Model::c: {
      if (spec.model == Model::c)
        for (int j = 0; j < d1; ++j)
          if (std::abs(w[j]) > 1.0)
            return 0.0;
      const double x1 = w[0];
      const double dev = w[d1] - 3.0 * x1 * x1 * x1;
      return std::sqrt(2.0 / 3.14159265358979323846) *
             std::exp(-2.0 * dev * dev);
    }
    case Model::a: {
      const double y1 = w[d1];
      const double y2 = w[d1 + 1];
      if (!(y2 > 0.0))
        return 0.0;
      double sum_x = 0.0;
      double sum_x2 = 0.0;
      for (int j = 0; j < d1; ++j) {
        sum_x += w[j];
        sum_x2 += w[j] * w[j];
      }
      const double dp1 = static_cast<double>(d1 + 1);
      const double beta1 = 0.5 * (6.0 + sum_x2 - sum_x * sum_x / dp1);
      const double mean = sum_x / dp1;
      const double shape = 4.0 + 0.5 * d1;
      const double norm = std::sqrt(dp1) /
                          (std::sqrt(2.0 * 3.14159265358979323846) *
                           std::tgamma(shape));
      return norm * std::pow(beta1, shape) *
             std::pow(y2, -(5.0 + 0.5 * (d1 + 1))) *
             std::exp(-beta1 / y2 - (y1 - mean) * (y1 - mean) * dp1 / (2.0 * y2));
    }
  }
  return 0.0;
}

//! Closed-form marginal density f_X of the conditioning variables.
//! Model (a)'s X is multivariate Student-t with 8 degrees of freedom and
//! scale (3/4)(I + 11^T) (normal-inverse-gamma mixture).
inline double known_marginal_density(const ModelSpec& spec,
                                     const Eigen::VectorXd& x)
{
  spec.validate();
  if (x.size() != spec.d1)
    throw DimensionMismatch("known_marginal_density: dimension mismatch");
  const int d1 = spec.d1;
  constexpr double pi = 3.14159265358979323846;

  switch (spec.model) {
    case Model::b: {
      double prod = 1.0;
      for (int j = 0; j < d1; ++j)
        prod *= std::exp(-0.5 * x[j] * x[j]) / std::sqrt(2.0 * pi);
      return prod;
    }
    case Model::c: {
      for (int j = 0; j < d1; ++j)
        if (std::abs(x[j]) > 1.0)
          return 0.0;
      return std::pow(0.5, d1);
    }
    case Model::a: {
      const double nu = 8.0;
      const double dp1 = static_cast<double>(d1 + 1);
      double sum_x = 0.0;
      double sum_x2 = 0.0;
      for (int j = 0; j < d1; ++j) {
        sum_x += x[j];
        sum_x2 += x[j] * x[j];
      }
      // quadratic form x^T Sigma^-1 x with Sigma = (3/4)(I + 11^T)
      const double q = (4.0 / 3.0) * (sum_x2 - sum_x * sum_x / dp1);
      const double det = std::pow(0.75, d1) * dp1;
      const double norm =
        std::tgamma(0.5 * (nu + d1)) /
        (std::tgamma(0.5 * nu) * std::pow(nu * pi, 0.5 * d1) * std::sqrt(det));
      return norm * std::pow(1.0 + q / nu, -0.5 * (nu + d1));
    }
  }
  return 0.0;
}

//! Writes a sample as CSV with header "x1,...,xd1,y1[,y2]".
inline void export_sample_csv(const Sample& sample, std::ostream& out)
{
  const int d1 = sample.d1();
  const int d2 = sample.d2();
  for (int j = 0; j < d1; ++j)
    out << 'x' << (j + 1) << ',';
  for (int j = 0; j < d2; ++j)
    out << 'y' << (j + 1) << (j + 1 < d2 ? "," : "");
  out << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < sample.n(); ++i) {
    for (int k = 0; k < sample.d(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", sample(i, k));
      out << buf << (k + 1 < sample.d() ? "," : "");
    }
    out << '\n';
  }
}

} // namespace cdrodeo
