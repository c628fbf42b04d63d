#pragma once

#include "cdrodeo/errors.hpp"
#include "cdrodeo/kernel.hpp"
#include "cdrodeo/parallel.hpp"
#include "cdrodeo/rodeo.hpp"
#include "cdrodeo/sample.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

namespace cdrodeo {

//! Analytic marginal density x -> f_X(x), x of length d1.
struct KnownMarginal
{
  std::function<double(const Eigen::VectorXd&)> density;
};

//! Truncated kernel pre-estimator built from an auxiliary sample of size
//! n_X = n^c (c > 1 so the sup-norm rate beats n^(-1/2)).
struct KernelPreestimator
{
  double c = 2.0;
  Kernel kernel = gaussian_kernel();
};

//! Chained decomposition f_X = f_{X1} * prod_j f_{Xj | X_{1:j-1}}, every
//! factor estimated by a RevDir pass in density/conditional mode.
struct ChainedRodeo
{
  RodeoConfig stage_config;
};

using MarginalSource =
  std::variant<KnownMarginal, KernelPreestimator, ChainedRodeo>;

//! Pre-estimator bandwidth h_X = n_X^(-(c-1)/(c d1)).
inline double preestimator_bandwidth(Eigen::Index n_x, int d1, double c)
{
  if (!(c > 1.0))
    throw InvalidInput("preestimator_bandwidth: requires c > 1");
  if (d1 < 1)
    throw DimensionMismatch("preestimator_bandwidth: requires d1 >= 1");
  return std::pow(static_cast<double>(n_x), -(c - 1.0) / (c * d1));
}

//! Classical product-kernel density estimate of f_X at u from the
//! auxiliary sample, with the fixed bandwidth h_X above.
inline double kernel_preestimate(const Matrix& aux_sample,
                                 const Eigen::VectorXd& u, const Kernel& kernel,
                                 double c)
{
  const Eigen::Index n_x = aux_sample.rows();
  const int d1 = static_cast<int>(aux_sample.cols());
  if (n_x < 1 || d1 < 1)
    throw DimensionMismatch("kernel_preestimate: empty auxiliary sample");
  if (u.size() != d1)
    throw DimensionMismatch("kernel_preestimate: point dimension mismatch");
  const double h_x = preestimator_bandwidth(n_x, d1, c);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n_x; ++i) {
    double prod = 1.0;
    for (int j = 0; j < d1; ++j)
      prod *= kernel.value((u[j] - aux_sample(i, j)) / h_x);
    sum += prod;
  }
  return sum / (static_cast<double>(n_x) * std::pow(h_x, d1));
}

struct ChainedOptions
{
  //! When set, stage values are persisted as one CSV per stage
  //! ("stage_<j>.csv", header "index,value") and reloaded on rerun.
  std::optional<std::filesystem::path> cache_dir;
  int threads = 0; //!< 0 -> hardware concurrency
};

namespace marginal_detail {

inline std::filesystem::path stage_path(const std::filesystem::path& dir,
                                        int stage)
{
  char name[32];
  std::snprintf(name, sizeof(name), "stage_%d.csv", stage);
  return dir / name;
}

inline bool load_stage(const std::filesystem::path& path, Eigen::Index n,
                       Vector& out)
{
  std::ifstream in(path);
  if (!in)
    return false;
  std::string line;
  if (!std::getline(in, line) || line != "index,value")
    return false;
  Vector values(n);
  Eigen::Index count = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      return false;
    const Eigen::Index idx = std::stoll(line.substr(0, comma));
    if (idx != count || count >= n)
      return false;
    values[count++] = std::stod(line.substr(comma + 1));
  }
  if (count != n)
    return false;
  out = std::move(values);
  return true;
}

inline void save_stage(const std::filesystem::path& path, const Vector& values)
{
  std::ofstream out(path);
  out << "index,value\n";
  char buf[40];
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << i << ',' << buf << '\n';
  }
}

//! Per-stage RevDir config. Unset a/h0 resolve inside the run to the
//! stage dimension's defaults (a = -1 for the univariate first stage).
inline RodeoConfig stage_config_for(const RodeoConfig& base)
{
  RodeoConfig cfg = base;
  cfg.variant = Variant::revdir;
  return cfg;
}

} // namespace marginal_detail

//! Recursive Rodeo pipeline for f~_X: stage 1 estimates the density of
//! X_1 at every observation, stage j the conditional density of X_j
//! given X_{1:j-1}, each by a RevDir pass consuming the running product
//! of the previous stages as its marginal. Returns the floored running
//! product over all d1 stages.
inline MarginalValues chained_marginal(const Sample& sample,
                                       const RodeoConfig& stage_config,
                                       const ChainedOptions& options = {})
{
  const int d1 = sample.d1();
  if (d1 < 1)
    throw DimensionMismatch("chained_marginal: requires d1 >= 1");
  const Eigen::Index n = sample.n();

  if (options.cache_dir)
    std::filesystem::create_directories(*options.cache_dir);

  Vector running = Vector::Ones(n);
  for (int stage = 1; stage <= d1; ++stage) {
    if (options.cache_dir) {
      Vector cached;
      if (marginal_detail::load_stage(
            marginal_detail::stage_path(*options.cache_dir, stage), n, cached)) {
        running = std::move(cached);
        continue;
      }
    }

    // Stage sample: columns 0..stage-1, conditioning on the first stage-1.
    Matrix stage_data = sample.data().leftCols(stage);
    const Sample stage_sample(std::move(stage_data), stage - 1);
    const MarginalValues stage_marginal =
      stage == 1 ? MarginalValues::unit(n) : MarginalValues(running, n);
    const RodeoConfig cfg = marginal_detail::stage_config_for(stage_config);

    Vector conditional(n);
    try {
      parallel_for(static_cast<std::size_t>(n), options.threads,
                   [&](std::size_t i) {
                     const EvalPoint w =
                       sample.data().row(static_cast<Eigen::Index>(i))
                         .head(stage)
                         .transpose();
                     const RodeoResult res =
                       run_revdir(stage_sample, stage_marginal, w, cfg);
                     conditional[static_cast<Eigen::Index>(i)] = res.estimate;
                   });
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("chained_marginal stage " + std::to_string(stage) +
                             ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw InvalidInput("chained_marginal stage " + std::to_string(stage) +
                         ": " + e.what());
    }

    running = (stage == 1)
                ? conditional
                : Vector(stage_marginal.values().cwiseProduct(conditional));
    if (options.cache_dir)
      marginal_detail::save_stage(
        marginal_detail::stage_path(*options.cache_dir, stage), running);
  }
  return MarginalValues(std::move(running), n);
}

//! Marginal values f~_X(X_i) for the estimator, floored at n^(-1/2).
inline MarginalValues marginal_values(const Sample& sample,
                                      const MarginalSource& source,
                                      const std::optional<Matrix>& aux_sample =
                                        std::nullopt,
                                      const ChainedOptions& options = {})
{
  const int d1 = sample.d1();
  if (d1 < 1)
    throw DimensionMismatch(
      "marginal_values: requires d1 >= 1 (use MarginalValues::unit for d1 = 0)");
  const Eigen::Index n = sample.n();

  if (const auto* known = std::get_if<KnownMarginal>(&source)) {
    Vector values(n);
    for (Eigen::Index i = 0; i < n; ++i)
      values[i] = known->density(sample.x_row(i));
    return MarginalValues(std::move(values), n);
  }
  if (const auto* pre = std::get_if<KernelPreestimator>(&source)) {
    if (!aux_sample)
      throw MissingAuxSample(
        "marginal_values: kernel_preestimator requires an auxiliary sample");
    if (aux_sample->cols() != d1)
      throw DimensionMismatch(
        "marginal_values: auxiliary sample must have d1 columns");
    Vector values(n);
    parallel_for(static_cast<std::size_t>(n), options.threads,
                 [&](std::size_t i) {
                   values[static_cast<Eigen::Index>(i)] = kernel_preestimate(
                     *aux_sample, sample.x_row(static_cast<Eigen::Index>(i)),
                     pre->kernel, pre->c);
                 });
    return MarginalValues(std::move(values), n);
  }
  const auto& chained = std::get<ChainedRodeo>(source);
  if (aux_sample)
    throw InvalidInput(
      "marginal_values: auxiliary sample is only used by the pre-estimator");
  return chained_marginal(sample, chained.stage_config, options);
}

} // namespace cdrodeo
