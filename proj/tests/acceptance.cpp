// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. An optional argument names the directory
// that receives the per-scale slice images.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "flag/flag_transform.hpp"
#include "flag/flaglet_transform.hpp"
#include "flag/io_container.hpp"
#include "flag/kernel_tiling.hpp"
#include "flag/quadrature.hpp"
#include "flag/signals.hpp"
#include "flag/sphere_wavelets.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace flag;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return oracle::max_abs_diff(a, b) / oracle::max_abs(b);
}

std::filesystem::path g_slice_dir = "acceptance_slices";

// ------------------------------------------------------------------ 1

Outcome flag_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  const std::pair<std::size_t, std::size_t> sizes[] = {{8, 8}, {16, 16}, {32, 32}, {64, 32}};
  for (const auto& [L, P] : sizes) {
    const FlagPlan plan({L, P, 1.0});
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto c = random_flag_coeffs(plan.limits(), seed);
      worst = std::max(worst, rel_diff(plan.forward(plan.inverse(c)).coeffs, c.coeffs));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-10, "max rel err " + sci(worst) + " over 4 sizes x 10 seeds (limit 1e-10), " +
                             sci(secs) + " s"};
}

// ------------------------------------------------------------------ 2

Outcome flaglet_exactness() {
  double worst = 0.0;
  int runs = 0;
  for (std::size_t n : {8, 16, 32}) {
    for (auto [lambda, nu] : {std::pair{2.0, 2.0}, std::pair{3.0, 2.0}}) {
      FlagletTransform ft(build_flaglet_kernels(n, n, {lambda, nu, 0, 0}));
      for (bool multires : {false, true}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
          const auto f = random_flag_coeffs({n, n, 1.0}, 100 * n + seed);
          worst = std::max(worst, rel_diff(ft.synthesize(ft.analyze(f, multires)).coeffs, f.coeffs));
          ++runs;
        }
      }
    }
  }
  return {worst < 1e-9, "max rel err " + sci(worst) + " over " + std::to_string(runs) +
                            " analyze/synthesize runs (limit 1e-9)"};
}

// ------------------------------------------------------------------ 3

Outcome admissibility() {
  double worst = 0.0;
  int sets = 0;
  for (std::size_t L : {16, 32, 64, 128}) {
    for (double lambda : {2.0, 3.0}) {
      for (std::size_t j0 : {0, 1, 2}) {
        const auto k = build_sphere_kernels(L, {lambda, 2.0, j0, 0});
        for (std::size_t l = 0; l < L; ++l) {
          double s = k.eta[l] * k.eta[l];
          for (const auto& kap : k.kappas) s += kap[l] * kap[l];
          worst = std::max(worst, std::fabs(s - 1.0));
        }
        ++sets;
      }
    }
  }
  for (std::size_t n : {8, 16, 32}) {
    for (auto [lambda, nu] : {std::pair{2.0, 2.0}, std::pair{3.0, 2.0}}) {
      for (std::size_t j0 : {0, 1}) {
        const auto k = build_flaglet_kernels(n, n, {lambda, nu, j0, j0});
        for (std::size_t i = 0; i < n * n; ++i) {
          double s = k.phi[i] * k.phi[i];
          for (const auto& psi : k.psis) s += psi[i] * psi[i];
          worst = std::max(worst, std::fabs(s - 1.0));
        }
        ++sets;
      }
    }
  }
  return {worst < 1e-10, "max deviation " + sci(worst) + " over " + std::to_string(sets) +
                             " sphere and ball parameter sets (limit 1e-10)"};
}

// ------------------------------------------------------------------ 4

// Gauss-Legendre weight from the closed form 2 / ((1 - x^2) P_n'(x)^2).
double legendre_weight(std::size_t n, double x) {
  const unsigned u = static_cast<unsigned>(n);
  const double dp = static_cast<double>(n) * (x * std::legendre(u, x) - std::legendre(u - 1, x)) /
                    (x * x - 1.0);
  return 2.0 / ((1.0 - x * x) * dp * dp);
}

// Generalised Gauss-Laguerre weight (alpha = 2) from the closed form
// Gamma(n + 3) x / (n! (n + 1)^2 L_{n+1}^{(2)}(x)^2).
double laguerre_weight(std::size_t n, double x) {
  const double nn = static_cast<double>(n);
  const double l1 = std::assoc_laguerre(static_cast<unsigned>(n + 1), 2u, x);
  return std::tgamma(nn + 3.0) * x / (std::tgamma(nn + 1.0) * (nn + 1.0) * (nn + 1.0) * l1 * l1);
}

Outcome oracle_equivalence() {
  double sht_worst = 0.0;
  double flag_worst = 0.0;
  for (std::size_t L = 1; L <= 8; ++L) {
    const auto s = sphere_sampling(L);
    const std::size_t nphi = sphere_nphi(L);
    const auto c = random_sphere_coeffs(L, 500 + L);
    const auto g = sht_inverse(c);
    const auto direct = oracle::sphere_synthesis(c.coeffs, L, s.thetas, s.phis);
    sht_worst = std::max(sht_worst, oracle::max_abs_diff(g.values, direct));
    // Forward: plain quadrature sum against conj(Y).
    const auto f = sht_forward(g);
    for (std::size_t l = 0; l < L; ++l) {
      for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
        cplx acc{};
        for (std::size_t t = 0; t < L; ++t) {
          const double w = legendre_weight(L, std::cos(s.thetas[t])) * 2.0 * std::numbers::pi /
                           static_cast<double>(nphi);
          for (std::size_t k = 0; k < nphi; ++k) {
            acc += w * g.at(t, k) * std::conj(oracle::ylm(l, m, s.thetas[t], s.phis[k]));
          }
        }
        sht_worst = std::max(sht_worst, std::abs(acc - f(l, m)));
      }
    }
  }
  for (std::size_t n = 1; n <= 8; ++n) {
    const BandLimits lim{n, n, 0.9};
    const auto s = sphere_sampling(n);
    const auto nodes = radial_nodes(lim.radial());
    const std::size_t nphi = sphere_nphi(n);
    const auto c = random_flag_coeffs(lim, 700 + n);
    const auto g = flag_inverse(c);
    const auto back = flag_forward(g);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<cplx> shell(n * n);
      for (std::size_t lm = 0; lm < n * n; ++lm) {
        for (std::size_t p = 0; p < n; ++p) {
          shell[lm] += c.coeffs[p * n * n + lm] * oracle::laguerre_k(p, lim.tau, nodes.radii[i]);
        }
      }
      const auto direct = oracle::sphere_synthesis(shell, n, s.thetas, s.phis);
      for (std::size_t q = 0; q < direct.size(); ++q) {
        flag_worst = std::max(flag_worst, std::abs(direct[q] - g.values[i * direct.size() + q]));
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t l = 0; l < n; ++l) {
        for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
          cplx acc{};
          for (std::size_t i = 0; i < n; ++i) {
            const double x = nodes.radii[i] / lim.tau;
            const double wr = std::pow(lim.tau, 3) * laguerre_weight(n, x) * std::exp(x);
            const double kp = oracle::laguerre_k(p, lim.tau, nodes.radii[i]);
            for (std::size_t t = 0; t < n; ++t) {
              const double wa = legendre_weight(n, std::cos(s.thetas[t])) * 2.0 * std::numbers::pi /
                                static_cast<double>(nphi);
              for (std::size_t k = 0; k < nphi; ++k) {
                acc += wr * wa * kp * g.at(i, t, k) * std::conj(oracle::ylm(l, m, s.thetas[t], s.phis[k]));
              }
            }
          }
          flag_worst = std::max(flag_worst, std::abs(acc - back(l, m, p)));
        }
      }
    }
  }
  return {sht_worst < 1e-11 && flag_worst < 1e-11,
          "SHT L<=8 max diff " + sci(sht_worst) + ", FLAG L=P<=8 max diff " + sci(flag_worst) +
              " vs direct sums, both directions (limit 1e-11)"};
}

// ------------------------------------------------------------------ 5

Outcome quadrature_exactness() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double gl_worst = 0.0;
  double lag_worst = 0.0;
  for (std::size_t n : {1, 2, 3, 5, 8, 16, 33, 64, 100, 128, 200, 256}) {
    const auto gl = gauss_legendre(n);
    const auto lag = gauss_laguerre_gen(n, 2);
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<double> c(2 * n);
      for (auto& v : c) v = coef(gen);
      // Legendre: exact moments 2/(k+1) for even k.
      double exact = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) exact += c[k] * oracle::legendre_moment(k);
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double p = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) p = p * gl.nodes[i] + c[k];
        quad += gl.weights[i] * p;
      }
      gl_worst = std::max(gl_worst, std::fabs(quad - exact) / std::max(1.0, std::fabs(exact)));

      // Laguerre: sum_k c_k x^k / Gamma(k + 3) has exact integral sum_k c_k.
      double lexact = 0.0;
      for (double v : c) lexact += v;
      double lquad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = lag.nodes[i];
        const double log_raw = std::log(lag.weights[i]) - x;
        for (std::size_t k = 0; k < c.size(); ++k) {
          lquad += c[k] * std::exp(log_raw + static_cast<double>(k) * std::log(x) -
                                   std::lgamma(static_cast<double>(k) + 3.0));
        }
      }
      lag_worst = std::max(lag_worst, std::fabs(lquad - lexact) / std::max(1.0, std::fabs(lexact)));
    }
  }
  return {gl_worst < 1e-11 && lag_worst < 1e-11,
          "degree 2n-1, n<=256: Gauss-Legendre max rel err " + sci(gl_worst) +
              ", Gauss-Laguerre(alpha=2) " + sci(lag_worst) + " (limit 1e-11)"};
}

// ------------------------------------------------------------------ 6

Outcome parseval() {
  double sphere = 0.0;
  double line = 0.0;
  double ball = 0.0;
  for (std::size_t L : {8, 32, 128}) {
    const SphereTransform t(L);
    const auto c = random_sphere_coeffs(L, L);
    const double e = coefficient_energy(c.coeffs);
    sphere = std::max(sphere, std::fabs(t.grid_energy(t.inverse(c)) - e) / e);
  }
  for (std::size_t P : {8, 32, 128}) {
    for (double tau : {0.5, 2.0}) {
      const RadialTransform t({P, tau});
      const auto c = random_flag_coeffs({1, P, tau}, P).coeffs;
      std::vector<cplx> samples(P);
      t.inverse(c.data(), 1, samples.data(), 1);
      double grid = 0.0;
      for (std::size_t i = 0; i < P; ++i) grid += t.weights()[i] * std::norm(samples[i]);
      const double e = coefficient_energy(c);
      line = std::max(line, std::fabs(grid - e) / e);
    }
  }
  for (auto [L, P] : {std::pair<std::size_t, std::size_t>{16, 16}, {32, 16}}) {
    const FlagPlan plan({L, P, 1.2});
    const auto c = random_flag_coeffs(plan.limits(), L + P);
    const double e = coefficient_energy(c.coeffs);
    ball = std::max(ball, std::fabs(plan.grid_energy(plan.inverse(c)) - e) / e);
  }
  return {sphere < 1e-10 && line < 1e-10 && ball < 1e-10,
          "rel energy mismatch sphere " + sci(sphere) + ", half-line " + sci(line) + ", ball " +
              sci(ball) + " (limit 1e-10)"};
}

// ------------------------------------------------------------------ 7

Outcome multires_consistency() {
  double worst = 0.0;
  for (std::size_t L : {32, 64}) {
    for (double lambda : {2.0, 3.0}) {
      SphereWaveletTransform wt(build_sphere_kernels(L, {lambda, 2.0, 0, 0}));
      const auto f = random_sphere_coeffs(L, 3 * L);
      const auto a = wt.synthesize(wt.analyze(f, false));
      const auto b = wt.synthesize(wt.analyze(f, true));
      worst = std::max(worst, oracle::max_abs_diff(a.coeffs, b.coeffs));
    }
  }
  bool fewer = true;
  std::string counts;
  for (std::size_t n : {16, 32, 64}) {
    FlagletTransform ft(build_flaglet_kernels(n, n, {}));
    const auto f = random_flag_coeffs({n, n, 1.0}, n);
    const auto full = ft.analyze(f, false);
    const auto multi = ft.analyze(f, true);
    worst = std::max(worst, oracle::max_abs_diff(ft.synthesize(full).coeffs, ft.synthesize(multi).coeffs));
    if (n >= 32) {
      fewer = fewer && multi.sample_count() < full.sample_count();
      counts += " L=P=" + std::to_string(n) + ": " + std::to_string(multi.sample_count()) + " vs " +
                std::to_string(full.sample_count()) + ";";
    }
  }

  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run({"flagtool", "bench", "--L", "32", "--P", "32", "--runs", "5", "--format", "json"},
                            out, err);
  std::string timing = "bench failed";
  if (code == 0) {
    const auto j = nlohmann::json::parse(out.str());
    timing = "bench L=P=32 median full " + sci(j["full"]["median_seconds"].get<double>()) +
             " s, multires " + sci(j["multires"]["median_seconds"].get<double>()) + " s";
  }
  return {worst < 1e-10 && fewer && code == 0,
          "full vs multires synthesis max diff " + sci(worst) + " (limit 1e-10); samples" + counts +
              " " + timing + " (report only)"};
}

// ------------------------------------------------------------------ 8

// Point sources with coefficients K_p(r0) conj(Y_lm) filtered by `profile`.
FlagCoeffs smoothed_sources(const BandLimits& lim, const std::vector<double>& profile,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rmax = radial_nodes(lim.radial()).radii.back();
  FlagCoeffs f(lim);
  for (int s = 0; s < 5; ++s) {
    const double r0 = (0.03 + 0.07 * u(rng)) * rmax;
    const double th = std::acos(2.0 * u(rng) - 1.0);
    const double ph = 2.0 * std::numbers::pi * u(rng);
    for (std::size_t p = 0; p < lim.P; ++p) {
      const double kp = oracle::laguerre_k(p, lim.tau, r0);
      for (std::size_t l = 0; l < lim.L; ++l) {
        const double w = profile[l * lim.P + p];
        if (w == 0.0) continue;
        for (long m = -static_cast<long>(l); m <= static_cast<long>(l); ++m) {
          f(l, m, p) += w * kp * std::conj(oracle::ylm(l, m, th, ph));
        }
      }
    }
  }
  return f;
}

int cli_call(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::vector<std::string> full = {"flagtool"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(full, out, err);
  if (out_text) *out_text = out.str();
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome blob_sparsity() {
  // Sources smoothed by one flaglet window: that scale must hold the most energy.
  const BandLimits lim{32, 32, 0.5};
  const auto k = build_flaglet_kernels(lim, {});
  FlagletTransform ft(k);
  int matched = 0;
  int cases = 0;
  for (auto [js, jps] : {std::pair{1u, 1u}, std::pair{2u, 2u}, std::pair{3u, 2u}, std::pair{3u, 3u},
                         std::pair{4u, 2u}, std::pair{2u, 4u}}) {
    const auto e = ft.part_energies(ft.analyze(smoothed_sources(lim, k.psi(js, jps), 40 + js), true));
    const std::size_t best = k.scale_slot(js, jps) + 1;
    bool ok = true;
    for (std::size_t s = 0; s < e.size(); ++s) ok = ok && (s == best || e[s] < e[best]);
    matched += ok;
    ++cases;
  }

  // Blob fields through the command-line pipeline: narrower blobs must move
  // the energy-weighted angular scale up, and every scale gets a slice image.
  std::filesystem::create_directories(g_slice_dir);
  const std::string grid = (g_slice_dir / "blobs.flg").string();
  const std::string dec = (g_slice_dir / "blobs_flaglets.flg").string();
  std::vector<double> mean_j;
  std::string widths;
  bool pipeline = true;
  for (const char* w : {"2.0", "1.0", "0.5", "0.25"}) {
    std::string report;
    pipeline = pipeline &&
               cli_call({"generate", "--L", "32", "--P", "32", "--tau", "0.1", "--signal", "blobs", "--blobs", "6",
                         "--width", w, "--r-min", "5", "--r-max", "5", "--real", "--seed", "3", "-o", grid}) == 0 &&
               cli_call({"analyze", "-i", grid, "-o", dec, "--multires", "--format", "json"}, &report) == 0;
    if (!pipeline) break;
    const auto j = nlohmann::json::parse(report);
    double tot = 0.0;
    double acc = 0.0;
    for (std::size_t s = 1; s < j["parts"].size(); ++s) {
      const auto& p = j["parts"][s];
      const double e = p["energy"].get<double>();
      tot += e;
      acc += e * std::stod(p["scale"].get<std::string>());
    }
    mean_j.push_back(acc / tot);
    char buf[48];
    std::snprintf(buf, sizeof buf, " w=%s:%.2f", w, acc / tot);
    widths += buf;
  }
  bool tracks = pipeline && mean_j.size() == 4;
  for (std::size_t i = 1; tracks && i < mean_j.size(); ++i) tracks = mean_j[i] > mean_j[i - 1];

  // Slice every scale of the last (narrowest) decomposition.
  int slices = 0;
  int expected = 0;
  if (pipeline) {
    const auto d = expect_kind<FlagletDecomposition>(read_container_file(dec), "acceptance");
    std::vector<std::string> parts = {"scaling"};
    for (std::size_t j = 0; j <= d.J_ang; ++j) {
      for (std::size_t jp = 0; jp <= d.J_rad; ++jp) parts.push_back(std::to_string(j) + "," + std::to_string(jp));
    }
    for (const auto& part : parts) {
      std::string name = part;
      std::replace(name.begin(), name.end(), ',', '_');
      const auto file = (g_slice_dir / ("slice_" + name + ".pgm")).string();
      ++expected;
      // Constant-longitude half-plane: radius against colatitude.
      if (cli_call({"slice", "-i", dec, "--part", part, "--axis", "phi", "--index", "0", "-o", file}) == 0 &&
          std::filesystem::file_size(file) > 0) {
        ++slices;
      }
    }
  }
  const bool pass = matched == cases && tracks && slices == expected && expected > 0;
  return {pass, "matched-scale dominance " + std::to_string(matched) + "/" + std::to_string(cases) +
                    "; mean angular scale vs blob width" + widths + (tracks ? " (increasing)" : " (NOT increasing)") +
                    "; " + std::to_string(slices) + "/" + std::to_string(expected) + " slices in " +
                    g_slice_dir.string()};
}

// ------------------------------------------------------------------ 9

template <typename T>
bool stable(const T& obj) {
  const auto bytes = encode_container(obj);
  std::stringstream ss;
  write_container(obj, ss);
  const auto back = expect_kind<T>(read_container(ss), "acceptance");
  return encode_container(back) == bytes && ss.str().size() == bytes.size();
}

Outcome serialization() {
  std::mt19937_64 rng(99);
  auto pick = [&](std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); };
  auto randomize = [&](auto& v) {
    for (auto& x : v) {
      if constexpr (std::is_same_v<std::decay_t<decltype(x)>, cplx>) {
        x = {std::ldexp(static_cast<double>(rng() >> 11), -40) - 4096.0, std::bit_cast<double>(rng() & 0x7fefffffffffffffULL)};
      } else {
        x = std::ldexp(static_cast<double>(rng() >> 11), -53);
      }
    }
  };
  int ok = 0;
  int total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t L = pick(2, 16);
    const std::size_t P = pick(2, 12);
    const double tau = 0.25 + static_cast<double>(pick(0, 100)) / 7.0;
    SphereGrid sg(L);
    randomize(sg.values);
    SphereCoeffs sc(L);
    randomize(sc.coeffs);
    BallGrid bg({L, P, tau});
    randomize(bg.values);
    FlagCoeffs fc({L, P, tau});
    randomize(fc.coeffs);
    const TilingParams params{2.0 + trial % 2, 2.0 + (trial / 2) % 2, 0, 0};
    auto sk = build_sphere_kernels(L, params);
    randomize(sk.eta);
    auto fk = build_flaglet_kernels(L, P, params);
    randomize(fk.phi);
    auto sd = sphere_analyze(random_sphere_coeffs(L, trial), sk, trial % 2 == 0);
    randomize(sd.scaling.values);
    for (auto& w : sd.wavelets) randomize(w.values);
    auto fd = flaglet_analyze(random_flag_coeffs({L, P, tau}, trial), fk, trial % 2 == 1);
    randomize(fd.scaling.values);
    for (auto& w : fd.wavelets) randomize(w.values);
    ok += stable(sg) + stable(sc) + stable(bg) + stable(fc) + stable(sk) + stable(fk) + stable(sd) + stable(fd);
    total += 8;
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " randomized objects (8 types) re-encode to identical bytes"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_slice_dir = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"FLAG transform exactness", flag_exactness},
      {"flaglet transform exactness", flaglet_exactness},
      {"admissibility", admissibility},
      {"direct-summation oracle equivalence", oracle_equivalence},
      {"quadrature exactness", quadrature_exactness},
      {"Parseval identities", parseval},
      {"multiresolution consistency", multires_consistency},
      {"blob-field scale concentration and slices", blob_sparsity},
      {"FLG1 serialization round trip", serialization},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " - "
              << o.detail << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
