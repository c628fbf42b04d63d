#include "cdrodeo/estimator.hpp"
#include "cdrodeo/models.hpp"
#include "cdrodeo/rodeo.hpp"

#include "rodeo_properties.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace cdrodeo;

namespace {

Sample standard_normal_sample(int n, int d, std::uint64_t seed, int d1 = 0)
{
  const CounterRng rng(seed);
  Matrix data(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k)
      data(i, k) = rng.normal(static_cast<std::uint64_t>(i) * 64 + 2 * k);
  return Sample(std::move(data), d1);
}

Sample uniform_sample(int n, int d, std::uint64_t seed, double lo, double hi)
{
  const CounterRng rng(seed);
  Matrix data(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k)
      data(i, k) = rng.uniform(static_cast<std::uint64_t>(i) * 64 + k, lo, hi);
  return Sample(std::move(data), 0);
}

// Literal transcription of the Direct loop, kept independent of the
// production runner: naive per-component Z, explicit threshold formula,
// plain vectors.
std::vector<int> direct_loop_oracle(const Sample& s, const MarginalValues& m,
                                    const EvalPoint& w, const Kernel& kernel,
                                    double a, double beta, double h0)
{
  const int d = s.d();
  const std::int64_t n = s.n();
  const KernelNorms norms = compute_norms(kernel);
  const double floor = std::log(static_cast<double>(n)) / static_cast<double>(n);
  std::vector<int> exps(d, 0);
  std::vector<bool> active(d, true);
  auto value = [&](int k) { return std::pow(beta, exps[k]) * h0; };
  while (true) {
    bool any = false;
    double prod = 1.0;
    for (int k = 0; k < d; ++k) {
      any = any || active[k];
      prod *= value(k);
    }
    if (!any || prod < floor)
      break;
    for (int k = 0; k < d; ++k) {
      if (!active[k])
        continue;
      double sum = 0.0;
      for (Eigen::Index i = 0; i < s.n(); ++i) {
        double others = 1.0;
        for (int c = 0; c < d; ++c)
          if (c != k)
            others *= kernel.value((w[c] - s(i, c)) / value(c)) / value(c);
        const double u = (w[k] - s(i, k)) / value(k);
        sum += j_function(kernel, u) / (value(k) * value(k)) * others / m[i];
      }
      const double z = -sum / static_cast<double>(s.n());
      const double lambda =
        4.0 * norms.j_l2 * std::pow(norms.k_l2, d - 1) *
        std::sqrt(std::pow(std::log(static_cast<double>(n)), a) /
                  (static_cast<double>(n) * value(k) * value(k) * prod));
      if (std::abs(z) > lambda)
        exps[k] += 1;
      else
        active[k] = false;
    }
  }
  return exps;
}

} // namespace

TEST_CASE("default_a follows the calibration rule")
{
  CHECK(default_a(1) == doctest::Approx(-1.0));
  CHECK(default_a(2) == doctest::Approx(0.0));
  CHECK(default_a(5) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("direct run with huge thresholds deactivates everything at h0")
{
  const Sample s = standard_normal_sample(200, 2, 3);
  const MarginalValues m = MarginalValues::unit(200);
  EvalPoint w(2);
  w << 0.0, 0.0;
  RodeoConfig cfg;
  cfg.variant = Variant::direct;
  cfg.h0 = 0.7;
  cfg.lambda_scale = 1e12;
  const RodeoResult res = run_direct(s, m, w, cfg);
  CHECK(res.trace.stop_reason == StopReason::all_deactivated);
  for (int k = 0; k < 2; ++k) {
    CHECK(res.bandwidth[k] == doctest::Approx(0.7));
    CHECK(res.deactivation_times[k] == 0);
  }
  // one round of tests, no bandwidth movement
  CHECK(res.trace.iterations.size() == 1);
}

TEST_CASE("direct run matches a hand-simulated loop oracle")
{
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const Sample s = standard_normal_sample(100, 1, seed);
    const MarginalValues m = MarginalValues::unit(100);
    EvalPoint w(1);
    w << 0.0;
    RodeoConfig cfg;
    cfg.variant = Variant::direct;
    cfg.a = -1.0;
    cfg.beta = 0.8;
    cfg.h0 = 0.9;
    const RodeoResult res = run_direct(s, m, w, cfg);
    const auto oracle = direct_loop_oracle(s, m, w, cfg.kernel, -1.0, 0.8, 0.9);
    REQUIRE(oracle.size() == 1);
    CHECK(res.deactivation_times[0] == oracle[0]);
    CHECK(res.bandwidth[0] ==
          doctest::Approx(std::pow(0.8, oracle[0]) * 0.9).epsilon(1e-12));
  }
}

TEST_CASE("zeroed thresholds drive the direct run to the product floor")
{
  const Sample s = standard_normal_sample(150, 2, 5);
  const MarginalValues m = MarginalValues::unit(150);
  EvalPoint w(2);
  w << 0.1, -0.2;
  RodeoConfig cfg;
  cfg.variant = Variant::direct;
  cfg.h0 = 0.9;
  cfg.lambda_scale = 0.0;
  const RodeoResult res = run_direct(s, m, w, cfg);
  CHECK(res.trace.stop_reason == StopReason::product_floor);
  const double floor = std::log(150.0) / 150.0;
  CHECK(res.bandwidth.product() >= std::pow(cfg.beta, 2) * floor * (1 - 1e-12));
  CHECK(res.bandwidth.product() < floor);
}

TEST_CASE("revdir with h0 = 1 reproduces the direct run")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ModelSpec spec{Model::b, 2, seed};
    const Sample s = sample_model(spec, 1500);
    const MarginalValues m = MarginalValues::unit(1500);
    EvalPoint w(3);
    w << 0.0, 0.0, 0.0;

    RodeoConfig direct_cfg;
    direct_cfg.variant = Variant::direct;
    direct_cfg.h0 = 1.0;
    // hold the two stopping floors equal
    direct_cfg.product_floor = std::log(1500.0) / 1500.0;
    RodeoConfig revdir_cfg = direct_cfg;
    revdir_cfg.variant = Variant::revdir;

    const RodeoResult rd = run_direct(s, m, w, direct_cfg);
    const RodeoResult rr = run_revdir(s, m, w, revdir_cfg);
    CHECK(rd.bandwidth.exponents() == rr.bandwidth.exponents());
    CHECK(rd.estimate == doctest::Approx(rr.estimate).epsilon(1e-14));
  }
}

TEST_CASE("all-irrelevant surrogate climbs to a common h_irr in (beta, 1]")
{
  // Flat uniform density, tiny n: thresholds dominate, every component
  // enters the reverse set and climbs until the cap.
  for (int d = 1; d <= 2; ++d) {
    const Sample s = uniform_sample(50, d, 77, -3.0, 3.0);
    const MarginalValues m = MarginalValues::unit(50);
    EvalPoint w = EvalPoint::Zero(d);
    RodeoConfig cfg;
    cfg.variant = Variant::revdir;
    cfg.h0 = 0.5;
    cfg.beta = 0.8;
    const RodeoResult res = run_revdir(s, m, w, cfg);
    REQUIRE(res.trace.iterations.size() >= 1);
    const auto& init = res.trace.iterations[0];
    CHECK(init.phase == Phase::init);
    for (int k = 0; k < d; ++k) {
      CHECK(std::abs(init.z_values.at(k)) <= init.lambda_values.at(k));
      CHECK(res.bandwidth[k] > cfg.beta);
      CHECK(res.bandwidth[k] <= 1.0);
      CHECK(res.bandwidth[k] == doctest::Approx(res.bandwidth[0]));
    }
    CHECK(res.trace.stop_reason == StopReason::reverse_cap);

    // with an empty direct set, the reverse variant coincides
    RodeoConfig rev_cfg = cfg;
    rev_cfg.variant = Variant::reverse;
    const RodeoResult rev = run_reverse(s, m, w, rev_cfg);
    CHECK(rev.bandwidth.exponents() == res.bandwidth.exponents());
  }
}

TEST_CASE("reverse run with h0 near 1 stops immediately")
{
  const Sample s = standard_normal_sample(100, 2, 9);
  const MarginalValues m = MarginalValues::unit(100);
  EvalPoint w(2);
  w << 0.0, 0.0;
  RodeoConfig cfg;
  cfg.variant = Variant::reverse;
  cfg.h0 = 0.95;
  cfg.beta = 0.8;
  const RodeoResult res = run_reverse(s, m, w, cfg);
  CHECK(res.trace.stop_reason == StopReason::reverse_cap);
  CHECK(res.trace.iterations.empty());
  for (int k = 0; k < 2; ++k)
    CHECK(res.bandwidth[k] == doctest::Approx(0.95));
}

TEST_CASE("reverse paths never decrease")
{
  const Sample s = uniform_sample(80, 2, 13, -2.0, 2.0);
  const MarginalValues m = MarginalValues::unit(80);
  EvalPoint w(2);
  w << 0.0, 0.0;
  RodeoConfig cfg;
  cfg.variant = Variant::reverse;
  cfg.h0 = 0.3;
  cfg.beta = 0.8;
  const RodeoResult res = run_reverse(s, m, w, cfg);
  Eigen::VectorXd last = Eigen::VectorXd::Constant(2, 0.3);
  for (const auto& it : res.trace.iterations) {
    CHECK(it.phase == Phase::reverse);
    for (int k = 0; k < 2; ++k) {
      CHECK(it.committed_bandwidth[k] >= last[k]);
      last[k] = it.committed_bandwidth[k];
    }
  }
}

TEST_CASE("reverse-cap scope flag does not change behavior")
{
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    const auto inst = rodeo_properties::make_random_instance(seed);
    RodeoConfig alt = inst.config;
    alt.reverse_cap_over_all = true;
    const RodeoResult r1 =
      run_rodeo(inst.sample, inst.marginal, inst.w, inst.config);
    const RodeoResult r2 = run_rodeo(inst.sample, inst.marginal, inst.w, alt);
    CHECK(r1.bandwidth.exponents() == r2.bandwidth.exponents());
  }
}

TEST_CASE("randomized property sweep (unit-sized)")
{
  int checked = 0;
  for (std::uint64_t seed = 500; seed < 560; ++seed) {
    const auto inst = rodeo_properties::make_random_instance(seed);
    const RodeoResult res =
      run_rodeo(inst.sample, inst.marginal, inst.w, inst.config);
    std::string failure;
    rodeo_properties::Checker chk{[&](const std::string& msg) {
      failure = msg;
    }};
    rodeo_properties::check_trace(chk, res, inst.config, inst.n, inst.a_used,
                                  inst.h0_used);
    const RodeoResult res2 =
      run_rodeo(inst.sample, inst.marginal, inst.w, inst.config);
    rodeo_properties::check_determinism(chk, res, res2);

    // selected estimate re-evaluates identically
    const double re = estimate(inst.sample, inst.marginal, res.bandwidth,
                               inst.w, inst.config.kernel);
    if (std::abs(re - res.estimate) > 1e-12 * std::max(1.0, std::abs(re)))
      failure = "estimate does not re-evaluate at the selected bandwidth";

    INFO("seed ", seed, ": ", failure);
    CHECK(failure.empty());
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("variant mismatches and degenerate inputs are rejected")
{
  const Sample s = standard_normal_sample(50, 1, 1);
  const MarginalValues m = MarginalValues::unit(50);
  EvalPoint w(1);
  w << 0.0;
  RodeoConfig cfg;
  cfg.variant = Variant::revdir;
  CHECK_THROWS_AS((void)run_direct(s, m, w, cfg), InvalidInput);
  cfg.variant = Variant::direct;
  CHECK_THROWS_AS((void)run_revdir(s, m, w, cfg), InvalidInput);
  cfg.beta = 1.5;
  CHECK_THROWS_AS((void)run_direct(s, m, w, cfg), InvalidInput);

  Matrix one(1, 1);
  one(0, 0) = 0.0;
  const Sample tiny(std::move(one), 0);
  const MarginalValues m1 = MarginalValues::unit(1);
  RodeoConfig ok;
  ok.variant = Variant::revdir;
  CHECK_THROWS_AS((void)run_revdir(tiny, m1, w, ok), InvalidInput);
}
