#include "cdrodeo/estimator.hpp"
#include "cdrodeo/kernel.hpp"
#include "cdrodeo/rng.hpp"
#include "cdrodeo/sample.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace cdrodeo;

namespace {

constexpr double kPi = 3.14159265358979323846;

double phi(double t)
{
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi);
}

Sample make_gaussian_sample(int n, int d, int d1, std::uint64_t seed)
{
  const CounterRng rng(seed);
  Matrix data(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k)
      data(i, k) = rng.normal(static_cast<std::uint64_t>(i) * 64 + 2 * k);
  return Sample(std::move(data), d1);
}

// Straight-line reimplementation of the estimator (plain loop, naive sum).
double estimate_naive(const Sample& s, const MarginalValues& m, const Vector& h,
                      const EvalPoint& w, const Kernel& k)
{
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    double prod = 1.0;
    for (int c = 0; c < s.d(); ++c)
      prod *= k.value((w[c] - s(i, c)) / h[c]) / h[c];
    sum += prod / m[i];
  }
  return sum / static_cast<double>(s.n());
}

// Deliberately simple O(n d) per-component reimplementation of Z_hj.
double z_naive(const Sample& s, const MarginalValues& m, const Vector& h,
               const EvalPoint& w, const Kernel& k, int j)
{
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    double prod = 1.0;
    for (int c = 0; c < s.d(); ++c) {
      if (c == j)
        continue;
      prod *= k.value((w[c] - s(i, c)) / h[c]) / h[c];
    }
    const double u = (w[j] - s(i, j)) / h[j];
    sum += j_function(k, u) / (h[j] * h[j]) * prod / m[i];
  }
  return -sum / static_cast<double>(s.n());
}

} // namespace

TEST_CASE("single-observation density estimate is one kernel term")
{
  Matrix data(1, 1);
  data(0, 0) = 0.0;
  const Sample s(std::move(data), 0);
  const MarginalValues m = MarginalValues::unit(1);
  const Bandwidth h(1, 1.0, 0.8);
  EvalPoint w(1);
  w << 0.0;
  CHECK(estimate(s, m, h, w, gaussian_kernel()) ==
        doctest::Approx(phi(0.0)).epsilon(1e-14));
}

TEST_CASE("two symmetric observations average to phi(1)")
{
  Matrix data(2, 1);
  data(0, 0) = -1.0;
  data(1, 0) = 1.0;
  const Sample s(std::move(data), 0);
  const MarginalValues m = MarginalValues::unit(2);
  const Bandwidth h(1, 1.0, 0.8);
  EvalPoint w(1);
  w << 0.0;
  CHECK(estimate(s, m, h, w, gaussian_kernel()) ==
        doctest::Approx(phi(1.0)).epsilon(1e-14));
}

TEST_CASE("single-observation Z equals -J(0)")
{
  Matrix data(1, 1);
  data(0, 0) = 0.0;
  const Sample s(std::move(data), 0);
  const MarginalValues m = MarginalValues::unit(1);
  const Bandwidth h(1, 1.0, 0.8);
  EvalPoint w(1);
  w << 0.0;
  const auto z = z_statistics(s, m, h, w, gaussian_kernel(), {0});
  CHECK(z[0] == doctest::Approx(-phi(0.0)).epsilon(1e-14));
}

TEST_CASE("Z matches central finite differences of the estimate")
{
  const CounterRng pick(7);
  std::uint64_t ctr = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const int d = 1 + static_cast<int>(pick.word(ctr++) % 4);
    const int d1 = static_cast<int>(pick.word(ctr++) % d);
    const int n = 20 + static_cast<int>(pick.word(ctr++) % 180);
    const Sample s = make_gaussian_sample(n, d, d1, 1000 + rep);
    const MarginalValues m = MarginalValues::unit(n);
    Vector h(d);
    for (int k = 0; k < d; ++k)
      h[k] = 0.9 * std::pow(0.8, static_cast<double>(
                                   static_cast<int>(pick.word(ctr++) % 5) - 1));
    EvalPoint w(d);
    for (int k = 0; k < d; ++k)
      w[k] = pick.uniform(ctr++, -1.0, 1.0);

    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    const auto z = z_statistics(s, m, h, w, gaussian_kernel(), all);
    for (int j = 0; j < d; ++j) {
      const double delta = 1e-5 * h[j];
      Vector hp = h;
      Vector hm = h;
      hp[j] += delta;
      hm[j] -= delta;
      const double fd = (estimate(s, m, hp, w, gaussian_kernel()) -
                         estimate(s, m, hm, w, gaussian_kernel())) /
                        (2.0 * delta);
      const double scale = std::max({std::abs(z[j]), std::abs(fd), 1e-12});
      worst = std::max(worst, std::abs(z[j] - fd) / scale);
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("shared-product Z agrees with the naive oracle to 1e-12")
{
  const CounterRng pick(11);
  std::uint64_t ctr = 0;
  for (int rep = 0; rep < 30; ++rep) {
    // include d > 8 so the scaled-product path faces the oracle too
    const int d = 1 + static_cast<int>(pick.word(ctr++) % 12);
    const int n = 10 + static_cast<int>(pick.word(ctr++) % 90);
    const Sample s = make_gaussian_sample(n, d, 0, 2000 + rep);
    const MarginalValues m = MarginalValues::unit(n);
    Vector h(d);
    for (int k = 0; k < d; ++k)
      h[k] = 0.8 * std::pow(0.8, static_cast<double>(
                                   static_cast<int>(pick.word(ctr++) % 6) - 2));
    EvalPoint w(d);
    for (int k = 0; k < d; ++k)
      w[k] = pick.uniform(ctr++, -1.5, 1.5);

    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    const auto z = z_statistics(s, m, h, w, gaussian_kernel(), all);
    for (int j = 0; j < d; ++j) {
      const double ref = z_naive(s, m, h, w, gaussian_kernel(), j);
      const double scale = std::max({std::abs(ref), std::abs(z[j]), 1e-300});
      CHECK(std::abs(z[j] - ref) / scale < 1e-12);
    }
    const double est = estimate(s, m, h, w, gaussian_kernel());
    const double est_ref = estimate_naive(s, m, h, w, gaussian_kernel());
    CHECK(est == doctest::Approx(est_ref).epsilon(1e-12));
  }
}

TEST_CASE("kernel density estimate integrates to one")
{
  const int n = 400;
  const Sample s = make_gaussian_sample(n, 1, 0, 99);
  const MarginalValues m = MarginalValues::unit(n);
  const Bandwidth h(1, 0.4, 0.8);
  double mass = 0.0;
  const double lo = -8.0, hi = 8.0;
  const int steps = 3200;
  const double dx = (hi - lo) / steps;
  for (int i = 0; i <= steps; ++i) {
    EvalPoint w(1);
    w << lo + i * dx;
    const double f = estimate(s, m, h, w, gaussian_kernel());
    mass += f * dx * (i == 0 || i == steps ? 0.5 : 1.0);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("threshold matches the formula and its symmetries")
{
  const KernelNorms norms = compute_norms(gaussian_kernel());
  const CounterRng pick(13);
  std::uint64_t ctr = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 1 + static_cast<int>(pick.word(ctr++) % 5);
    const std::int64_t n = 2 + static_cast<std::int64_t>(pick.word(ctr++) % 100000);
    const double a = pick.uniform(ctr++, -1.5, 2.5);
    Vector h(d);
    for (int k = 0; k < d; ++k)
      h[k] = pick.uniform(ctr++, 0.05, 1.0);
    const int j = static_cast<int>(pick.word(ctr++) % d);

    // substitution oracle
    const double c_l = 4.0 * norms.j_l2 * std::pow(norms.k_l2, d - 1);
    const double expected =
      c_l * std::sqrt(std::pow(std::log(static_cast<double>(n)), a) /
                      (static_cast<double>(n) * h[j] * h[j] * h.prod()));
    CHECK(threshold(norms, h, j, n, a, d) ==
          doctest::Approx(expected).epsilon(1e-13));

    // permutation invariance over the components other than j
    Vector hp = h;
    for (int k = 0; k < d; ++k) {
      if (k == j)
        continue;
      for (int l = k + 1; l < d; ++l) {
        if (l == j)
          continue;
        std::swap(hp[k], hp[l]);
        CHECK(threshold(norms, hp, j, n, a, d) ==
              doctest::Approx(threshold(norms, h, j, n, a, d)).epsilon(1e-13));
      }
    }
  }

  // doubling h_j at fixed others multiplies lambda by 2^(-3/2)
  Vector h(3);
  h << 0.5, 0.25, 0.7;
  const double lam = threshold(norms, h, 1, 1000, 1.0, 3);
  Vector h2 = h;
  h2[1] *= 2.0;
  CHECK(threshold(norms, h2, 1, 1000, 1.0, 3) ==
        doctest::Approx(lam * std::pow(2.0, -1.5)).epsilon(1e-13));

  // a = 0 removes the log factor
  const double lam0 = threshold(norms, h, 0, 1000, 0.0, 3);
  CHECK(lam0 == doctest::Approx(4.0 * norms.j_l2 * norms.k_l2 * norms.k_l2 /
                                std::sqrt(1000.0 * h[0] * h[0] * h.prod()))
                  .epsilon(1e-13));

  CHECK_THROWS_AS((void)threshold(norms, h, 0, 1, 1.0, 3), InvalidInput);
}

TEST_CASE("default_h0: clamp, monotonicity, and pinned regression value")
{
  const KernelNorms norms = compute_norms(gaussian_kernel());

  // d = 1, a = 0: the unclamped value C_lambda^2 n^(-1/5) exceeds 1 for
  // small n, so the clamp engages.
  const double c_l = 4.0 * norms.j_l2;
  CHECK(c_l * c_l * std::pow(3.0, -0.2) > 1.0);
  CHECK(default_h0(norms, 3, 0.0, 1, 2) == doctest::Approx(1.0));

  // nonincreasing in n
  double prev = 2.0;
  for (std::int64_t n : {3, 10, 100, 1000, 100000, 10000000}) {
    const double h0 = default_h0(norms, n, 0.5, 1, 2);
    CHECK(h0 <= prev + 1e-15);
    CHECK(h0 > 0.0);
    prev = h0;
  }

  // substitution oracle at the paper's sparsity setting
  const std::int64_t n = 100000;
  const double a = std::log(4.0);
  const double oracle =
    std::pow(4.0 * norms.j_l2 * std::pow(norms.k_l2, 4), 2.0 / 5.0) *
    std::pow(std::pow(std::log(100000.0), a) / 100000.0, 1.0 / 25.0);
  const double h0 = default_h0(norms, n, a, 5, 2);
  CHECK(h0 == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(h0 > 0.0);
  CHECK(h0 < 1.0);
  // frozen regression value (substitution oracle, Gaussian kernel)
  CHECK(h0 == doctest::Approx(0.33504).epsilon(1e-4));
}

TEST_CASE("dimension mismatches are rejected")
{
  const Sample s = make_gaussian_sample(10, 2, 0, 5);
  const MarginalValues m = MarginalValues::unit(10);
  Vector h_bad(3);
  h_bad << 0.5, 0.5, 0.5;
  EvalPoint w(2);
  w << 0.0, 0.0;
  CHECK_THROWS_AS((void)estimate(s, m, h_bad, w, gaussian_kernel()),
                  DimensionMismatch);
  Vector h(2);
  h << 0.5, 0.5;
  EvalPoint w_bad(1);
  w_bad << 0.0;
  CHECK_THROWS_AS((void)estimate(s, m, h, w_bad, gaussian_kernel()),
                  DimensionMismatch);
  CHECK_THROWS_AS(
    (void)z_statistics(s, m, h, w, gaussian_kernel(), std::vector<int>{2}),
    DimensionMismatch);
  const MarginalValues m_bad = MarginalValues::unit(9);
  CHECK_THROWS_AS((void)estimate(s, m_bad, h, w, gaussian_kernel()),
                  DimensionMismatch);
}

TEST_CASE("marginal values are floored at n^(-1/2)")
{
  Vector raw(4);
  raw << 0.0, 1e-9, 0.7, 2.0;
  const MarginalValues m(raw, 4);
  CHECK(m[0] == doctest::Approx(0.5));
  CHECK(m[1] == doctest::Approx(0.5));
  CHECK(m[2] == doctest::Approx(0.7));
  CHECK(m[3] == doctest::Approx(2.0));
}
