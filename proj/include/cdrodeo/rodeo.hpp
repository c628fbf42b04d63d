#pragma once

#include "cdrodeo/bandwidth.hpp"
#include "cdrodeo/errors.hpp"
#include "cdrodeo/estimator.hpp"
#include "cdrodeo/kernel.hpp"
#include "cdrodeo/sample.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cdrodeo {

enum class Variant
{
  direct,
  reverse,
  revdir
};

enum class Phase
{
  init,
  reverse,
  direct
};

enum class StopReason
{
  all_deactivated, //!< every component failed its test at some point
  reverse_cap,     //!< some components were frozen by the max <= beta guard
  product_floor,   //!< the Direct loop hit the bandwidth-product floor
  safety_cap       //!< iteration cap reached; reported, never silent
};

inline const char* to_string(StopReason r)
{
  switch (r) {
    case StopReason::all_deactivated: return "all_deactivated";
    case StopReason::reverse_cap: return "reverse_cap";
    case StopReason::product_floor: return "product_floor";
    case StopReason::safety_cap: return "safety_cap";
  }
  return "?";
}

inline const char* to_string(Variant v)
{
  switch (v) {
    case Variant::direct: return "direct";
    case Variant::reverse: return "reverse";
    case Variant::revdir: return "revdir";
  }
  return "?";
}

inline Variant variant_by_name(const std::string& name)
{
  if (name == "direct")
    return Variant::direct;
  if (name == "reverse")
    return Variant::reverse;
  if (name == "revdir")
    return Variant::revdir;
  throw InvalidInput("unknown variant: " + name);
}

//! Tuning a = log(d-1) from the calibration study; a = -1 for the
//! univariate case.
inline double default_a(int d)
{
  if (d < 1)
    throw InvalidInput("default_a: d must be >= 1");
  return d == 1 ? -1.0 : std::log(static_cast<double>(d - 1));
}

struct RodeoConfig
{
  Variant variant = Variant::revdir;
  Kernel kernel = gaussian_kernel();
  //! Threshold exponent; unset -> default_a(d).
  std::optional<double> a;
  double beta = 0.8;
  //! Initialization bandwidth in (0, 1]; unset -> default_h0 with the
  //! kernel's order.
  std::optional<double> h0;
  //! Iteration cap; 0 -> 10 d ceil(log_{1/beta} n).
  int max_iterations = 0;
  //! Overrides the variant's bandwidth-product floor when set (used to
  //! hold the Direct and RevDir floors equal in comparisons).
  std::optional<double> product_floor;
  //! Threshold scale hook for stopping-rule tests (lambda *= this).
  double lambda_scale = 1.0;
  //! Reverse-phase guard scope: max over still-active components
  //! (default) or over all components. Both readings coincide under the
  //! literal update rule; the flag keeps the alternative testable.
  bool reverse_cap_over_all = false;

  void validate() const
  {
    if (!(beta > 0.0 && beta < 1.0))
      throw InvalidInput("RodeoConfig: beta must lie in (0,1)");
    if (h0 && !(*h0 > 0.0 && *h0 <= 1.0))
      throw InvalidInput("RodeoConfig: explicit h0 must lie in (0,1]");
    if (!(lambda_scale >= 0.0))
      throw InvalidInput("RodeoConfig: lambda_scale must be >= 0");
  }
};

//! One tested round: the bandwidth the tests ran at, the Z and lambda
//! values per tested component, and the bandwidth committed afterwards.
struct RodeoIteration
{
  int t = 0;
  Phase phase = Phase::init;
  std::vector<int> active_set;
  Bandwidth tested_bandwidth;
  std::map<int, double> z_values;
  std::map<int, double> lambda_values;
  Bandwidth committed_bandwidth;
};

struct RodeoTrace
{
  std::vector<RodeoIteration> iterations;
  StopReason stop_reason = StopReason::all_deactivated;
  std::int64_t z_evaluations = 0;
};

struct RodeoResult
{
  Bandwidth bandwidth;
  double estimate = 0.0;
  RodeoTrace trace;
  //! Signed grid exponent t_k of each component of the selected
  //! bandwidth (negative: grew in the Reverse phase).
  std::vector<int> deactivation_times;
};

namespace rodeo_detail {

struct Context
{
  const Sample& sample;
  const MarginalValues& marginal;
  const EvalPoint& w;
  const RodeoConfig& config;
  KernelNorms norms;
  double a = 0.0;
  double h0 = 0.0;
  int d = 0;
  std::int64_t n = 0;
  int safety_cap = 0;
};

inline Context make_context(const Sample& sample, const MarginalValues& marginal,
                            const EvalPoint& w, const RodeoConfig& config)
{
  config.validate();
  if (sample.n() < 2)
    throw InvalidInput("rodeo: requires n >= 2");
  if (w.size() != sample.d())
    throw DimensionMismatch("rodeo: evaluation point dimension mismatch");
  Context ctx{sample, marginal, w, config, cached_norms(config.kernel),
              0.0,    0.0,      0, 0,     0};
  ctx.d = sample.d();
  ctx.n = static_cast<std::int64_t>(sample.n());
  ctx.a = config.a ? *config.a : default_a(ctx.d);
  ctx.h0 = config.h0 ? *config.h0
                     : default_h0(ctx.norms, ctx.n, ctx.a, ctx.d,
                                  config.kernel.order);
  const double log_ratio =
    std::log(static_cast<double>(ctx.n)) / std::log(1.0 / config.beta);
  ctx.safety_cap = config.max_iterations > 0
                     ? config.max_iterations
                     : 10 * ctx.d * static_cast<int>(std::ceil(log_ratio));
  return ctx;
}

//! Z and lambda for the given components at bandwidth h; appends a trace
//! record and bumps the evaluation counter.
inline std::pair<std::map<int, double>, std::map<int, double>>
test_components(const Context& ctx, const Bandwidth& h,
                const std::vector<int>& components, RodeoTrace& trace)
{
  const std::vector<double> z = z_statistics(ctx.sample, ctx.marginal, h, ctx.w,
                                             ctx.config.kernel, components);
  std::map<int, double> z_map;
  std::map<int, double> lambda_map;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const int j = components[c];
    const double lambda =
      threshold(ctx.norms, h, j, ctx.n, ctx.a, ctx.d) * ctx.config.lambda_scale;
    if (std::isnan(z[c]) || std::isnan(lambda))
      throw NumericalFailure("rodeo: NaN Z or lambda at component " +
                             std::to_string(j));
    z_map[j] = z[c];
    lambda_map[j] = lambda;
  }
  trace.z_evaluations += static_cast<std::int64_t>(components.size());
  return {std::move(z_map), std::move(lambda_map)};
}

inline void record(RodeoTrace& trace, int t, Phase phase,
                   std::vector<int> active, const Bandwidth& tested,
                   std::map<int, double> z, std::map<int, double> lambda,
                   const Bandwidth& committed)
{
  trace.iterations.push_back(RodeoIteration{t, phase, std::move(active), tested,
                                            std::move(z), std::move(lambda),
                                            committed});
}

inline std::vector<int> all_components(int d)
{
  std::vector<int> v(d);
  for (int k = 0; k < d; ++k)
    v[k] = k;
  return v;
}

//! Direct loop: shrink active components while |Z| > lambda, stop when
//! none are active or the bandwidth product drops below the floor.
inline StopReason direct_loop(const Context& ctx, Bandwidth& h,
                              std::vector<int> active, double floor,
                              RodeoTrace& trace, int& iterations_used)
{
  int t = 0;
  while (true) {
    if (active.empty())
      return StopReason::all_deactivated;
    if (h.product() < floor)
      return StopReason::product_floor;
    if (++iterations_used > ctx.safety_cap)
      return StopReason::safety_cap;
    ++t;
    const Bandwidth tested = h;
    auto [z, lambda] = test_components(ctx, tested, active, trace);
    std::vector<int> next;
    for (int j : active) {
      if (std::abs(z[j]) > lambda[j]) {
        h.step_down(j);
        next.push_back(j);
      }
    }
    record(trace, t, Phase::direct, active, tested, std::move(z),
           std::move(lambda), h);
    active = std::move(next);
  }
}

//! Reverse loop: grow active components while |Z| <= lambda at the trial
//! bandwidth, guarded by max committed component <= beta.
//! Returns true when the loop ended on the guard with components still
//! active (they were frozen by the cap, not by a failed test).
inline bool reverse_loop(const Context& ctx, Bandwidth& h,
                         std::vector<int> active, RodeoTrace& trace,
                         int& iterations_used, StopReason& safety)
{
  int t = -1;
  while (true) {
    if (active.empty())
      return false;
    const double cap_max = ctx.config.reverse_cap_over_all
                             ? h.max()
                             : h.max_over(active);
    if (!(cap_max <= ctx.config.beta))
      return true;
    if (++iterations_used > ctx.safety_cap) {
      safety = StopReason::safety_cap;
      return true;
    }
    Bandwidth trial = h;
    for (int j : active)
      trial.step_up(j);
    auto [z, lambda] = test_components(ctx, trial, active, trace);
    std::vector<int> next;
    for (int j : active) {
      if (std::abs(z[j]) <= lambda[j]) {
        h.set_exponent(j, trial.exponent(j));
        next.push_back(j);
      }
    }
    record(trace, t, Phase::reverse, active, trial, std::move(z),
           std::move(lambda), h);
    active = std::move(next);
    --t;
  }
}

inline RodeoResult finish(const Context& ctx, Bandwidth h, RodeoTrace trace,
                          StopReason reason)
{
  trace.stop_reason = reason;
  const double fhat =
    estimate(ctx.sample, ctx.marginal, h, ctx.w, ctx.config.kernel);
  if (std::isnan(fhat))
    throw NumericalFailure("rodeo: NaN estimate at the selected bandwidth");
  std::vector<int> times = h.exponents();
  return RodeoResult{std::move(h), fhat, std::move(trace), std::move(times)};
}

} // namespace rodeo_detail

//! Direct CDRodeo: all components start active at h0 and shrink while
//! their |Z_hj| stays above threshold; floor (log n)/n.
inline RodeoResult run_direct(const Sample& sample,
                              const MarginalValues& marginal, const EvalPoint& w,
                              const RodeoConfig& config)
{
  if (config.variant != Variant::direct)
    throw InvalidInput("run_direct: config.variant must be direct");
  const auto ctx = rodeo_detail::make_context(sample, marginal, w, config);
  const double log_n = std::log(static_cast<double>(ctx.n));
  const double floor =
    config.product_floor ? *config.product_floor
                         : log_n / static_cast<double>(ctx.n);

  Bandwidth h(ctx.d, ctx.h0, config.beta);
  RodeoTrace trace;
  int used = 0;
  const StopReason reason = rodeo_detail::direct_loop(
    ctx, h, rodeo_detail::all_components(ctx.d), floor, trace, used);
  return rodeo_detail::finish(ctx, std::move(h), std::move(trace), reason);
}

//! Reverse CDRodeo: every component grows (divides by beta) while its
//! |Z_hj| stays below threshold at the trial bandwidth. Ablation variant;
//! equals RevDir whenever RevDir's Direct set comes out empty.
inline RodeoResult run_reverse(const Sample& sample,
                               const MarginalValues& marginal,
                               const EvalPoint& w, const RodeoConfig& config)
{
  if (config.variant != Variant::reverse)
    throw InvalidInput("run_reverse: config.variant must be reverse");
  const auto ctx = rodeo_detail::make_context(sample, marginal, w, config);

  Bandwidth h(ctx.d, ctx.h0, config.beta);
  RodeoTrace trace;
  int used = 0;
  StopReason safety = StopReason::all_deactivated;
  const bool capped = rodeo_detail::reverse_loop(
    ctx, h, rodeo_detail::all_components(ctx.d), trace, used, safety);
  StopReason reason = capped ? StopReason::reverse_cap
                             : StopReason::all_deactivated;
  if (safety == StopReason::safety_cap)
    reason = safety;
  return rodeo_detail::finish(ctx, std::move(h), std::move(trace), reason);
}

//! RevDir CDRodeo: the initialization test splits components into a
//! Reverse set (|Z| <= lambda at H0: bandwidth should grow) and a Direct
//! set (the rest: bandwidth should shrink), then runs both phases with
//! floor (log n)^(1+a)/n for the Direct phase.
inline RodeoResult run_revdir(const Sample& sample,
                              const MarginalValues& marginal, const EvalPoint& w,
                              const RodeoConfig& config)
{
  if (config.variant != Variant::revdir)
    throw InvalidInput("run_revdir: config.variant must be revdir");
  const auto ctx = rodeo_detail::make_context(sample, marginal, w, config);
  const double log_n = std::log(static_cast<double>(ctx.n));
  const double floor = config.product_floor
                         ? *config.product_floor
                         : std::pow(log_n, 1.0 + ctx.a) /
                             static_cast<double>(ctx.n);

  Bandwidth h(ctx.d, ctx.h0, config.beta);
  RodeoTrace trace;

  // Initialization: test every component at H0 = (h0, ..., h0).
  const auto all = rodeo_detail::all_components(ctx.d);
  auto [z0, lambda0] = rodeo_detail::test_components(ctx, h, all, trace);
  std::vector<int> act_rev;
  std::vector<int> act_dir;
  for (int k = 0; k < ctx.d; ++k) {
    if (std::abs(z0[k]) <= lambda0[k])
      act_rev.push_back(k);
    else
      act_dir.push_back(k);
  }
  rodeo_detail::record(trace, 0, Phase::init, all, h, std::move(z0),
                       std::move(lambda0), h);

  int used = 0;
  StopReason safety = StopReason::all_deactivated;
  const bool capped =
    rodeo_detail::reverse_loop(ctx, h, act_rev, trace, used, safety);
  if (safety == StopReason::safety_cap)
    return rodeo_detail::finish(ctx, std::move(h), std::move(trace), safety);

  const StopReason direct_reason =
    rodeo_detail::direct_loop(ctx, h, act_dir, floor, trace, used);

  StopReason reason = direct_reason;
  if (direct_reason == StopReason::all_deactivated && capped)
    reason = StopReason::reverse_cap;
  return rodeo_detail::finish(ctx, std::move(h), std::move(trace), reason);
}

//! Dispatch on config.variant.
inline RodeoResult run_rodeo(const Sample& sample, const MarginalValues& marginal,
                             const EvalPoint& w, const RodeoConfig& config)
{
  switch (config.variant) {
    case Variant::direct: return run_direct(sample, marginal, w, config);
    case Variant::reverse: return run_reverse(sample, marginal, w, config);
    case Variant::revdir: return run_revdir(sample, marginal, w, config);
  }
  throw InvalidInput("run_rodeo: unknown variant");
}

} // namespace cdrodeo
