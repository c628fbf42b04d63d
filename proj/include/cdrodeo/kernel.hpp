#pragma once

#include "cdrodeo/errors.hpp"
#include "cdrodeo/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

namespace cdrodeo {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

//! Univariate kernel of class C1.
//!
//! `order` is the number p of vanishing moments (the first p-1 moments
//! integrate to zero). `support_radius` is infinite for the Gaussian; all
//! numerical work on unbounded kernels is restricted to an effective
//! radius where the omitted mass is below 1e-30.
struct Kernel
{
  using Fn = double (*)(double);

  Fn value = nullptr;
  Fn derivative = nullptr;
  int order = 2;
  double support_radius = std::numeric_limits<double>::infinity();
  const char* name = "";

  //! Radius actually used for quadrature and neighborhood computations.
  double effective_radius() const
  {
    return std::isfinite(support_radius) ? support_radius : 12.0;
  }

  double operator()(double t) const { return value(t); }
};

//! J(t) = K(t) + t K'(t), the derivative statistic's kernel factor.
inline double j_function(const Kernel& kernel, double t)
{
  return kernel.value(t) + t * kernel.derivative(t);
}

namespace kernels_detail {

inline double gaussian_value(double t)
{
  return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

inline double gaussian_derivative(double t)
{
  return -t * gaussian_value(t);
}

// Biweight (quartic) kernel, C1 and compactly supported on [-1, 1].
inline double biweight_value(double t)
{
  if (std::abs(t) >= 1.0)
    return 0.0;
  const double u = 1.0 - t * t;
  return 0.9375 * u * u;
}

inline double biweight_derivative(double t)
{
  if (std::abs(t) >= 1.0)
    return 0.0;
  return -3.75 * t * (1.0 - t * t);
}

} // namespace kernels_detail

inline Kernel gaussian_kernel()
{
  return Kernel{kernels_detail::gaussian_value,
                kernels_detail::gaussian_derivative, 2,
                std::numeric_limits<double>::infinity(), "gaussian"};
}

inline Kernel biweight_kernel()
{
  return Kernel{kernels_detail::biweight_value,
                kernels_detail::biweight_derivative, 2, 1.0, "biweight"};
}

inline Kernel kernel_by_name(const std::string& name)
{
  if (name == "gaussian")
    return gaussian_kernel();
  if (name == "biweight")
    return biweight_kernel();
  throw InvalidInput("unknown kernel: " + name);
}

//! L1/L2/sup norms of K and of J, computed once per kernel and cached by
//! the caller (thresholds read them in inner loops).
struct KernelNorms
{
  double k_l1 = 0.0;
  double k_l2 = 0.0;
  double k_sup = 0.0;
  double j_l1 = 0.0;
  double j_l2 = 0.0;
  double j_sup = 0.0;
};

inline KernelNorms compute_norms(const Kernel& kernel)
{
  const double r = kernel.effective_radius();
  const auto j = [&](double t) { return j_function(kernel, t); };
  KernelNorms norms;
  norms.k_l1 = quadrature::integrate(
    [&](double t) { return std::abs(kernel.value(t)); }, -r, r, 1e-10);
  norms.k_l2 = std::sqrt(quadrature::integrate(
    [&](double t) { return kernel.value(t) * kernel.value(t); }, -r, r, 1e-12));
  norms.j_l1 =
    quadrature::integrate([&](double t) { return std::abs(j(t)); }, -r, r, 1e-10);
  norms.j_l2 = std::sqrt(
    quadrature::integrate([&](double t) { return j(t) * j(t); }, -r, r, 1e-12));
  norms.k_sup = quadrature::sup_abs([&](double t) { return kernel.value(t); }, -r, r);
  norms.j_sup = quadrature::sup_abs(j, -r, r);
  return norms;
}

//! Norms are immutable once computed; cached per kernel so threshold
//! evaluations in inner loops never re-run quadrature.
inline const KernelNorms& cached_norms(const Kernel& kernel)
{
  static std::mutex mutex;
  static std::map<Kernel::Fn, KernelNorms> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(kernel.value);
  if (it == cache.end())
    it = cache.emplace(kernel.value, compute_norms(kernel)).first;
  return it->second;
}

//! Threshold constant C_lambda = 4 ||J||_2 ||K||_2^(d-1).
inline double c_lambda(const KernelNorms& norms, int d)
{
  if (d < 1)
    throw InvalidInput("c_lambda: d must be >= 1");
  return 4.0 * norms.j_l2 * std::pow(norms.k_l2, d - 1);
}

} // namespace cdrodeo
