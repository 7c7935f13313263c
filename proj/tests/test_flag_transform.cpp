#include <cmath>
#include <numbers>
#include <thread>

#include "doctest.h"
#include "flag/error.hpp"
#include "flag/flag_transform.hpp"
#include "flag/signals.hpp"
#include "oracles.hpp"

using namespace flag;

namespace {

double rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  return oracle::max_abs_diff(got, want) / oracle::max_abs(want);
}

}  // namespace

TEST_CASE("flag_forward of the lowest product basis function") {
  const BandLimits lim{5, 6, 1.3};
  const auto nodes = radial_nodes(lim.radial());
  BallGrid g(lim);
  const double y00 = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (std::size_t i = 0; i < lim.P; ++i) {
    const double k0 = laguerre_basis(lim.radial(), nodes.radii[i])[0];
    for (std::size_t t = 0; t < lim.L; ++t) {
      for (std::size_t k = 0; k < sphere_nphi(lim.L); ++k) g.at(i, t, k) = k0 * y00;
    }
  }
  const auto c = flag_forward(g);
  CHECK(std::abs(c(0, 0, 0) - 1.0) < 1e-12);
  for (std::size_t n = 1; n < c.coeffs.size(); ++n) CHECK(std::abs(c.coeffs[n]) < 1e-12);

  const auto z = flag_forward(BallGrid(lim));
  for (const auto& v : z.coeffs) CHECK(v == cplx{});
}

TEST_CASE("flag_inverse of a delta and of zero") {
  const BandLimits lim{4, 5, 0.8};
  FlagCoeffs c(lim);
  c(0, 0, 0) = 1.0;
  const auto g = flag_inverse(c);
  const auto nodes = radial_nodes(lim.radial());
  const double y00 = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (std::size_t i = 0; i < lim.P; ++i) {
    const double expect = laguerre_basis(lim.radial(), nodes.radii[i])[0] * y00;
    for (std::size_t t = 0; t < lim.L; ++t) {
      for (std::size_t k = 0; k < sphere_nphi(lim.L); ++k) {
        CHECK(std::abs(g.at(i, t, k) - expect) < 1e-14);
      }
    }
  }
  for (const auto& v : flag_inverse(FlagCoeffs(lim)).values) CHECK(v == cplx{});
}

TEST_CASE("flag_inverse matches the direct quadruple sum") {
  const BandLimits lim{8, 8, 1.0};
  const auto c = random_flag_coeffs(lim, 77);
  const auto g = flag_inverse(c);
  const auto s = sphere_sampling(lim.L);
  const auto nodes = radial_nodes(lim.radial());
  double worst = 0.0;
  for (std::size_t i = 0; i < lim.P; ++i) {
    for (std::size_t t = 0; t < lim.L; ++t) {
      for (std::size_t k = 0; k < sphere_nphi(lim.L); ++k) {
        cplx acc{};
        for (std::size_t p = 0; p < lim.P; ++p) {
          const double kp = oracle::laguerre_k(p, lim.tau, nodes.radii[i]);
          for (std::size_t l = 0; l < lim.L; ++l) {
            for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
              acc += c(l, m, p) * kp * oracle::ylm(l, m, s.thetas[t], s.phis[k]);
            }
          }
        }
        worst = std::fmax(worst, std::abs(acc - g.at(i, t, k)));
      }
    }
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("flag round trip, L = P = 16") {
  const BandLimits lim{16, 16, 1.0};
  const auto c = random_flag_coeffs(lim, 1);
  CHECK(oracle::max_abs_diff(flag_forward(flag_inverse(c)).coeffs, c.coeffs) < 1e-10);
}

TEST_CASE("flag round trip in both directions") {
  const std::pair<std::size_t, std::size_t> sizes[] = {{4, 4}, {8, 8}, {16, 16}, {32, 32}, {64, 32}};
  for (const auto& [L, P] : sizes) {
    const FlagPlan plan({L, P, 1.0});
    double worst_c = 0.0;
    double worst_g = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto c = random_flag_coeffs(plan.limits(), seed + 1000 * L);
      const auto g = plan.inverse(c);
      worst_c = std::fmax(worst_c, rel_err(plan.forward(g).coeffs, c.coeffs));
      worst_g = std::fmax(worst_g, rel_err(plan.inverse(plan.forward(g)).values, g.values));
    }
    CAPTURE(L);
    CAPTURE(P);
    CHECK(worst_c < 1e-10);
    CHECK(worst_g < 1e-10);
  }
}

TEST_CASE("ball Parseval identity") {
  for (double tau : {0.5, 2.5}) {
    const FlagPlan plan({12, 10, tau});
    const auto c = random_flag_coeffs(plan.limits(), 3);
    const double grid = plan.grid_energy(plan.inverse(c));
    const double coeff = coefficient_energy(c.coeffs);
    CHECK(std::fabs(grid - coeff) / coeff < 1e-10);
  }
}

TEST_CASE("flag_forward is linear") {
  const FlagPlan plan({10, 9, 1.0});
  const auto f = plan.inverse(random_flag_coeffs(plan.limits(), 5));
  const auto g = plan.inverse(random_flag_coeffs(plan.limits(), 6));
  const cplx a{0.7, -1.2};
  const cplx b{-2.0, 0.25};
  BallGrid h(plan.limits());
  for (std::size_t n = 0; n < h.values.size(); ++n) h.values[n] = a * f.values[n] + b * g.values[n];
  const auto ch = plan.forward(h);
  const auto cf = plan.forward(f);
  const auto cg = plan.forward(g);
  double worst = 0.0;
  for (std::size_t n = 0; n < ch.coeffs.size(); ++n) {
    worst = std::fmax(worst, std::abs(ch.coeffs[n] - (a * cf.coeffs[n] + b * cg.coeffs[n])));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("radial-first and angular-first compositions agree") {
  const BandLimits lim{9, 7, 1.4};
  const FlagPlan plan(lim);
  const auto g = plan.inverse(random_flag_coeffs(lim, 8));
  const std::size_t L = lim.L;
  const std::size_t P = lim.P;
  const std::size_t ns = sphere_sample_count(L);

  // Radial projection first at every angular sample, then per-p SHT.
  std::vector<cplx> radial(P * ns);
  for (std::size_t s = 0; s < ns; ++s) plan.radial().forward(g.values.data() + s, ns, radial.data() + s, ns);
  FlagCoeffs alt(lim);
  for (std::size_t p = 0; p < P; ++p) {
    SphereGrid sg(L);
    std::copy_n(radial.begin() + static_cast<long>(p * ns), ns, sg.values.begin());
    const auto sc = plan.sphere().forward(sg);
    std::copy(sc.coeffs.begin(), sc.coeffs.end(), alt.coeffs.begin() + static_cast<long>(p * L * L));
  }
  CHECK(oracle::max_abs_diff(alt.coeffs, plan.forward(g).coeffs) < 1e-12);
}

TEST_CASE("a shared plan gives identical results from several threads") {
  const FlagPlan plan({16, 12, 1.0});
  std::vector<FlagCoeffs> inputs;
  for (std::uint64_t seed = 0; seed < 4; ++seed) inputs.push_back(random_flag_coeffs(plan.limits(), seed));
  std::vector<BallGrid> serial;
  for (const auto& c : inputs) serial.push_back(plan.inverse(c));
  std::vector<BallGrid> parallel(inputs.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    threads.emplace_back([&, t] { parallel[t] = plan.inverse(inputs[t]); });
  }
  for (auto& th : threads) th.join();
  for (std::size_t t = 0; t < inputs.size(); ++t) CHECK(parallel[t].values == serial[t].values);
}

TEST_CASE("flag transforms reject malformed inputs") {
  BallGrid g({4, 4, 1.0});
  g.values.resize(10);
  CHECK_THROWS_AS(flag_forward(g), InvalidArgument);
  FlagCoeffs c({4, 4, 1.0});
  c.limits.tau = -1.0;
  CHECK_THROWS_AS(flag_inverse(c), InvalidArgument);
  CHECK_THROWS_AS(FlagPlan({0, 4, 1.0}), InvalidArgument);
  const FlagPlan plan({4, 4, 1.0});
  CHECK_THROWS_AS(plan.forward(BallGrid({4, 4, 2.0})), InvalidArgument);
}
