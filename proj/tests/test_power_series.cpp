#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "resint/errors.hpp"
#include "resint/power_series.hpp"
#include "resint/tls_two_bath.hpp"

using namespace resint;
using doctest::Approx;

namespace {

using cd = std::complex<double>;

std::vector<double> amplitudes(std::span<const KernelTerm> ks) {
  std::vector<double> a;
  for (const auto& k : ks) a.push_back(k.amplitude);
  return a;
}

std::vector<double> rates(std::span<const KernelTerm> ks) {
  std::vector<double> l;
  for (const auto& k : ks) l.push_back(k.rate);
  return l;
}

// Taylor coefficients of exp(-lambda t/2)[cosh(dt/2) + (lambda/d) sinh(dt/2)]
// written with D = d^2 so only real arithmetic is needed.
std::vector<double> closed_form_taylor(double gamma, double lambda, int order) {
  const double d2 = lambda * lambda - 2 * gamma * lambda;
  std::vector<double> even_odd(order + 1, 0.0), decay(order + 1, 0.0);
  double fact = 1.0;
  for (int n = 0; n <= order; ++n) {
    if (n > 0) fact *= n;
    const int k = n / 2;
    const double dk = std::pow(d2, k);
    even_odd[n] = n % 2 == 0 ? dk / (std::pow(4.0, k) * fact) : lambda * dk / (std::pow(2.0, n) * fact);
    decay[n] = std::pow(-lambda / 2, n) / fact;
  }
  return oracle::cauchy_product(decay, even_odd);
}

// Series helpers for the log-derivative construction.
std::vector<double> series_divide(const std::vector<double>& num, const std::vector<double>& den) {
  std::vector<double> q(num.size(), 0.0);
  for (std::size_t n = 0; n < num.size(); ++n) {
    double acc = num[n];
    for (std::size_t k = 1; k <= n; ++k) acc -= den[k] * q[n - k];
    q[n] = acc / den[0];
  }
  return q;
}

std::vector<double> series_exp(const std::vector<double>& f) {
  // g = exp(f), g' = f' g, f[0] = 0.
  std::vector<double> g(f.size(), 0.0);
  g[0] = 1.0;
  for (std::size_t n = 1; n < f.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += double(k) * f[k] * g[n - k];
    g[n] = acc / double(n);
  }
  return g;
}

}  // namespace

TEST_CASE("series arithmetic truncates") {
  const PowerSeries a(std::vector<double>{1.0, 2.0, 3.0});
  const PowerSeries b(std::vector<double>{0.5, -1.0});
  const auto p = a * b;
  CHECK(p.truncation_order() == 1);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.0);
  CHECK((a + b).coeffs() == std::vector<double>{1.5, 1.0});
  CHECK((a - a).coeffs() == std::vector<double>{0.0, 0.0, 0.0});
  CHECK((2.0 * a)[2] == 6.0);
  CHECK(a.squared().coeffs() == std::vector<double>{1.0, 4.0, 10.0});
  CHECK(a.evaluate(2.0) == 17.0);
  CHECK_THROWS_AS(PowerSeries(std::vector<double>{}), ParameterError);
}

TEST_CASE("amplitude series") {
  const std::array<KernelTerm, 2> ks{KernelTerm{0.7, 1.3}, KernelTerm{0.2, 4.0}};
  SUBCASE("low orders by hand") {
    const auto c = series_amplitude(ks, 8, 1.0);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 0.0);
    CHECK(c[2] == Approx(-(0.7 + 0.2) / 2).epsilon(1e-15));
    CHECK(c[3] == Approx((0.7 * 1.3 + 0.2 * 4.0) / 6).epsilon(1e-15));
  }
  SUBCASE("matches powers of the linear-system matrix") {
    const auto c = series_amplitude(ks, 12, 0.6);
    const auto ref = oracle::taylor_amplitude(amplitudes(ks), rates(ks), 12, 0.6);
    for (int n = 0; n <= 12; ++n) CHECK(c[n] == Approx(ref[n]).epsilon(1e-12));
  }
  SUBCASE("single kernel matches the closed-form Taylor expansion") {
    for (const BathParams& b : {BathParams{1.0, 0.3, 0}, BathParams{0.5, 7.0, 0}}) {
      const std::array<KernelTerm, 1> one{kernel_term(b)};
      const auto c = series_amplitude(one, 6, 1.0);
      const auto ref = closed_form_taylor(b.gamma, b.width, 6);
      for (int n = 0; n <= 6; ++n) CHECK(std::abs(c[n] - ref[n]) <= 1e-12 * std::max(1e-300, std::abs(ref[n])) + 1e-300);
    }
  }
  SUBCASE("small-time agreement with the Volterra amplitude") {
    const TwoBathModel m{{1.4, 1.0, 0}, {0.1, 4.0, 0}, 1.0};
    const std::array<KernelTerm, 2> mk{kernel_term(m.bath1), kernel_term(m.bath2)};
    const auto c = series_amplitude(mk, 10, 1.0);
    const auto k = model_kernels(m);
    const UniformGrid grid{0.2, 2000};
    const auto traj = volterra_solve(k, 1.0, grid);
    CHECK(std::abs(traj.values.back().real() - c.evaluate(0.2)) < 1e-7);
  }
  CHECK_THROWS_AS(series_amplitude(ks, 3), ParameterError);
}

TEST_CASE("additive population series") {
  const std::array<KernelTerm, 2> ks{KernelTerm{0.7, 1.3}, KernelTerm{0.2, 4.0}};
  SUBCASE("leading terms") {
    const auto s = additive_population_series(ks, 8, 0.8);
    CHECK(s[0] == Approx(0.64).epsilon(1e-15));
    CHECK(s[1] == 0.0);
  }
  SUBCASE("one kernel off") {
    const std::array<KernelTerm, 2> off{KernelTerm{0.7, 1.3}, KernelTerm{0.0, 4.0}};
    const std::array<KernelTerm, 1> one{KernelTerm{0.7, 1.3}};
    const auto s = additive_population_series(off, 8, 1.0);
    const auto ref = series_amplitude(one, 8, 1.0).squared();
    for (int n = 0; n <= 8; ++n) CHECK(s[n] == Approx(ref[n]).epsilon(1e-14));
  }
  SUBCASE("log-derivative construction") {
    // exp(-int sum_i Gamma_i) with Gamma_i = -2 u_i'/u_i, each u_i from the
    // single-bath matrix system.
    const int order = 10;
    std::vector<double> rate_integral(order + 1, 0.0);
    for (const auto& k : ks) {
      const auto u = oracle::taylor_amplitude({k.amplitude}, {k.rate}, order + 1, 1.0);
      std::vector<double> du(order + 1);
      for (int n = 0; n <= order; ++n) du[n] = (n + 1) * u[n + 1];
      const auto g = series_divide(du, std::vector<double>(u.begin(), u.end() - 1));
      for (int n = 0; n < order; ++n) rate_integral[n + 1] += 2.0 * g[n] / (n + 1);
    }
    const auto ref = series_exp(rate_integral);
    const auto s = additive_population_series(ks, order, 1.0);
    for (int n = 0; n <= order; ++n) CHECK(std::abs(s[n] - ref[n]) <= 1e-12 * std::max(1.0, std::abs(ref[n])));
  }
}

TEST_CASE("interference order") {
  SUBCASE("one bath off") {
    const std::array<KernelTerm, 2> off{KernelTerm{0.7, 1.3}, KernelTerm{0.0, 4.0}};
    CHECK_FALSE(interference_order(off).order.has_value());
  }
  SUBCASE("fourth order with an independently derived gap") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
      const BathParams b1{std::pow(10.0, u(rng)), std::pow(10.0, u(rng)), 0};
      const BathParams b2{std::pow(10.0, u(rng)), std::pow(10.0, u(rng)), 0};
      const double c0 = 0.5 + 0.5 * std::abs(u(rng)) / 1.5;
      const std::array<KernelTerm, 2> ks{kernel_term(b1), kernel_term(b2)};
      const auto io = interference_order(ks, 8, c0);
      REQUIRE(io.order.has_value());
      CHECK(*io.order == 4);

      const auto exact = oracle::cauchy_product(oracle::two_bath_taylor(ks[0].amplitude, ks[0].rate, ks[1].amplitude,
                                                                ks[1].rate, 8, c0),
                                                oracle::two_bath_taylor(ks[0].amplitude, ks[0].rate, ks[1].amplitude,
                                                                ks[1].rate, 8, c0));
      auto amp = oracle::cauchy_product(oracle::one_bath_taylor(ks[0].amplitude, ks[0].rate, 8),
                                        oracle::one_bath_taylor(ks[1].amplitude, ks[1].rate, 8));
      for (auto& x : amp) x *= c0;
      const auto additive = oracle::cauchy_product(amp, amp);
      for (int n = 0; n < 4; ++n)
        CHECK(std::abs(exact[n] - additive[n]) <= 1e-9 * std::max(1.0, std::abs(exact[n])));
      const double oracle_gap = exact[4] - additive[4];
      CHECK(io.gap == Approx(oracle_gap).epsilon(1e-10));
      const double bilinear = -(b1.gamma * b1.width) * (b2.gamma * b2.width) / 12.0 * c0 * c0;
      CHECK(io.gap == Approx(bilinear).epsilon(1e-10));
    }
  }
  SUBCASE("bilinear scaling") {
    const BathParams b1{0.9, 1.7, 0}, b2{0.4, 0.6, 0};
    const auto gap = [&](double s1, double s2) {
      const std::array<KernelTerm, 2> ks{kernel_term({b1.gamma * s1, b1.width, 0}),
                                         kernel_term({b2.gamma * s2, b2.width, 0})};
      return interference_order(ks).gap;
    };
    CHECK(gap(1, 2) == Approx(2 * gap(1, 1)).epsilon(1e-12));
    CHECK(gap(2, 2) == Approx(4 * gap(1, 1)).epsilon(1e-12));
    CHECK(gap(0.3, 5) == Approx(1.5 * gap(1, 1)).epsilon(1e-10));
  }
  SUBCASE("matches the additivity error at small times") {
    const TwoBathModel m{{1.0, 0.5, 0}, {0.7, 0.2, 0}, 1.0};
    const std::array<KernelTerm, 2> ks{kernel_term(m.bath1), kernel_term(m.bath2)};
    const auto io = interference_order(ks);
    const double t = 0.01;
    const double eps = exact_population(m, t) - additive_population(m, t);
    CHECK(eps == Approx(io.gap * std::pow(t, 4)).epsilon(0.05));
  }
  CHECK_THROWS_AS(interference_order(std::array<KernelTerm, 1>{KernelTerm{1, 1}}, 5), ParameterError);
}
