#pragma once

#include "cdrodeo/bandwidth.hpp"
#include "cdrodeo/errors.hpp"
#include "cdrodeo/kernel.hpp"
#include "cdrodeo/sample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace cdrodeo {

namespace detail {

//! Fixed-block pairwise summation. The block layout depends only on the
//! number of terms, so partial sums may be computed by different workers
//! and still reduce to the bit-identical total.
class PairwiseAccumulator
{
public:
  static constexpr std::size_t kBlock = 1024;

  void add(double term)
  {
    block_sum_ += term;
    if (++in_block_ == kBlock)
      flush_block();
  }

  double total()
  {
    if (in_block_ > 0)
      flush_block();
    return reduce(0, partials_.size());
  }

private:
  void flush_block()
  {
    partials_.push_back(block_sum_);
    block_sum_ = 0.0;
    in_block_ = 0;
  }

  double reduce(std::size_t lo, std::size_t hi) const
  {
    if (hi == lo)
      return 0.0;
    if (hi - lo == 1)
      return partials_[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return reduce(lo, mid) + reduce(mid, hi);
  }

  std::vector<double> partials_;
  double block_sum_ = 0.0;
  std::size_t in_block_ = 0;
};

//! Product of nonnegative factors carried as mantissa * 2^exp2 so long
//! products (d > 8) neither underflow nor overflow mid-stream. For
//! in-range products the result matches the direct product bit for bit
//! (scaling by powers of two commutes with rounding).
struct ScaledProduct
{
  double mantissa = 1.0;
  long exp2 = 0;

  void mul(double f)
  {
    int e = 0;
    mantissa = std::frexp(mantissa * f, &e);
    exp2 += e;
  }

  double value() const
  {
    if (mantissa == 0.0 || exp2 < -2000)
      return 0.0;
    if (exp2 > 2000)
      return std::numeric_limits<double>::infinity();
    return std::ldexp(mantissa, static_cast<int>(exp2));
  }

  static double combine(const ScaledProduct& a, const ScaledProduct& b)
  {
    const double m = a.mantissa * b.mantissa;
    const long e = a.exp2 + b.exp2;
    if (m == 0.0 || e < -2000)
      return 0.0;
    if (e > 2000)
      return std::numeric_limits<double>::infinity();
    return std::ldexp(m, static_cast<int>(e));
  }
};

inline void check_dims(const Sample& sample, const MarginalValues& marginal,
                       const Vector& h, const EvalPoint& w)
{
  if (h.size() != sample.d())
    throw DimensionMismatch("bandwidth dimension does not match sample");
  if (w.size() != sample.d())
    throw DimensionMismatch("evaluation point dimension does not match sample");
  if (marginal.size() != sample.n())
    throw DimensionMismatch("marginal values do not match sample size");
  for (Eigen::Index k = 0; k < h.size(); ++k)
    if (!(h[k] > 0.0))
      throw InvalidInput("bandwidth components must be positive");
}

} // namespace detail

//! BLR kernel estimator f^_h(w): mean over observations of the product
//! kernel divided by the marginal pre-estimator value. With d1 = 0 the
//! marginal is identically 1 and this is the usual kernel density
//! estimator.
inline double estimate(const Sample& sample, const MarginalValues& marginal,
                       const Vector& h, const EvalPoint& w,
                       const Kernel& kernel)
{
  detail::check_dims(sample, marginal, h, w);
  const int d = sample.d();
  const Eigen::Index n = sample.n();
  detail::PairwiseAccumulator acc;
  if (d <= 8) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double prod = 1.0;
      for (int k = 0; k < d; ++k)
        prod *= kernel.value((w[k] - sample(i, k)) / h[k]) / h[k];
      acc.add(prod / marginal[i]);
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      detail::ScaledProduct prod;
      for (int k = 0; k < d; ++k)
        prod.mul(kernel.value((w[k] - sample(i, k)) / h[k]) / h[k]);
      acc.add(prod.value() / marginal[i]);
    }
  }
  return acc.total() / static_cast<double>(n);
}

inline double estimate(const Sample& sample, const MarginalValues& marginal,
                       const Bandwidth& h, const EvalPoint& w,
                       const Kernel& kernel)
{
  return estimate(sample, marginal, h.values(), w, kernel);
}

//! Derivative statistics Z_hj = d f^_h(w) / d h_j for the requested
//! components.
//!
//! The per-observation kernel products are shared across components via
//! prefix/suffix partial products, so one call costs O(n (d + m)) for m
//! requested components instead of O(n d m).
inline std::vector<double> z_statistics(const Sample& sample,
                                        const MarginalValues& marginal,
                                        const Vector& h, const EvalPoint& w,
                                        const Kernel& kernel,
                                        const std::vector<int>& components)
{
  detail::check_dims(sample, marginal, h, w);
  const int d = sample.d();
  const Eigen::Index n = sample.n();
  for (int j : components)
    if (j < 0 || j >= d)
      throw DimensionMismatch("z_statistics: component index out of range");

  const std::size_t m = components.size();
  std::vector<detail::PairwiseAccumulator> acc(m);
  std::vector<double> u(d);

  if (d <= 8) {
    std::vector<double> prefix(d + 1), suffix(d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k)
        u[k] = (w[k] - sample(i, k)) / h[k];
      prefix[0] = 1.0;
      for (int k = 0; k < d; ++k)
        prefix[k + 1] = prefix[k] * (kernel.value(u[k]) / h[k]);
      suffix[d] = 1.0;
      for (int k = d - 1; k >= 0; --k)
        suffix[k] = suffix[k + 1] * (kernel.value(u[k]) / h[k]);
      const double inv_f = 1.0 / marginal[i];
      for (std::size_t c = 0; c < m; ++c) {
        const int j = components[c];
        const double others = prefix[j] * suffix[j + 1];
        acc[c].add(-j_function(kernel, u[j]) / (h[j] * h[j]) * others * inv_f);
      }
    }
  } else {
    std::vector<detail::ScaledProduct> prefix(d + 1), suffix(d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k)
        u[k] = (w[k] - sample(i, k)) / h[k];
      prefix[0] = detail::ScaledProduct{};
      for (int k = 0; k < d; ++k) {
        prefix[k + 1] = prefix[k];
        prefix[k + 1].mul(kernel.value(u[k]) / h[k]);
      }
      suffix[d] = detail::ScaledProduct{};
      for (int k = d - 1; k >= 0; --k) {
        suffix[k] = suffix[k + 1];
        suffix[k].mul(kernel.value(u[k]) / h[k]);
      }
      const double inv_f = 1.0 / marginal[i];
      for (std::size_t c = 0; c < m; ++c) {
        const int j = components[c];
        const double others =
          detail::ScaledProduct::combine(prefix[j], suffix[j + 1]);
        acc[c].add(-j_function(kernel, u[j]) / (h[j] * h[j]) * others * inv_f);
      }
    }
  }

  std::vector<double> z(m);
  for (std::size_t c = 0; c < m; ++c)
    z[c] = acc[c].total() / static_cast<double>(n);
  return z;
}

inline std::vector<double> z_statistics(const Sample& sample,
                                        const MarginalValues& marginal,
                                        const Bandwidth& h, const EvalPoint& w,
                                        const Kernel& kernel,
                                        const std::vector<int>& components)
{
  return z_statistics(sample, marginal, h.values(), w, kernel, components);
}

//! Threshold lambda_hj = C_lambda sqrt((log n)^a / (n h_j^2 prod_k h_k)).
inline double threshold(const KernelNorms& norms, const Vector& h, int j,
                        std::int64_t n, double a, int d)
{
  if (n < 2)
    throw InvalidInput("threshold: requires n >= 2 (log n must be positive)");
  if (j < 0 || j >= h.size())
    throw DimensionMismatch("threshold: component index out of range");
  const double log_n = std::log(static_cast<double>(n));
  const double denom = static_cast<double>(n) * h[j] * h[j] * h.prod();
  return c_lambda(norms, d) * std::sqrt(std::pow(log_n, a) / denom);
}

inline double threshold(const KernelNorms& norms, const Bandwidth& h, int j,
                        std::int64_t n, double a, int d)
{
  return threshold(norms, h.values(), j, n, a, d);
}

//! Initialization bandwidth: the lower bound of the admissible range,
//! C_lambda^(2/d) ((log n)^a / n)^(1/(d(2p+1))), clamped into (0, 1].
inline double default_h0(const KernelNorms& norms, std::int64_t n, double a,
                         int d, int p)
{
  if (n < 3)
    throw InvalidInput("default_h0: requires n >= 3");
  const double log_n = std::log(static_cast<double>(n));
  const double h0 = std::pow(c_lambda(norms, d), 2.0 / d) *
                    std::pow(std::pow(log_n, a) / static_cast<double>(n),
                             1.0 / (d * (2.0 * p + 1.0)));
  return std::min(h0, 1.0);
}

} // namespace cdrodeo
