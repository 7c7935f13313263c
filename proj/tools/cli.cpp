#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "flag/error.hpp"
#include "flag/flag_transform.hpp"
#include "flag/flaglet_transform.hpp"
#include "flag/io_container.hpp"
#include "flag/kernel_tiling.hpp"
#include "flag/signals.hpp"
#include "flag/sphere_wavelets.hpp"

namespace flag::cli {
namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::size_t L = 16;
  std::size_t P = 16;
  double tau = 1.0;
  double lambda = 2.0;
  double nu = 2.0;
  std::size_t j0_ang = 0;
  std::size_t j0_rad = 0;
  std::uint64_t seed = 1;
  bool multires = false;
  std::string format = "text";
  std::string input;
  std::string output;

  std::string domain = "ball";
  std::string signal = "random";
  std::string store = "grid";
  bool real = false;
  std::size_t blobs = 8;
  double width = 0.5;
  double r_min = 0.0;
  double r_max = 0.0;
  double noise = 0.0;

  double threshold = 0.0;
  std::string mode = "hard";

  std::string axis = "shell";
  std::size_t index = 0;
  std::string part = "scaling";
  std::string component = "re";
  std::string image;

  std::size_t runs = 5;
  bool coeffs_out = false;
  std::string container;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <typename F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

BandLimits checked_limits(const CliConfig& cfg) {
  const BandLimits lim{cfg.L, cfg.P, cfg.tau};
  as_usage([&] { lim.validate(); return 0; });
  return lim;
}

TilingParams tiling(const CliConfig& cfg) {
  return {cfg.lambda, cfg.nu, cfg.j0_ang, cfg.j0_rad};
}

ContainerObject load(const std::string& path) { return read_container_file(path); }

std::size_t save(const ContainerObject& obj, const std::string& path) {
  return write_container_file(obj, path);
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Deterministic standard normal draws (Box-Muller on the documented generator).
double gaussian(SignalRng& rng) {
  const double u1 = 1.0 - rng.unit();
  const double u2 = rng.unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string scale_label(std::size_t slot, std::size_t radial_count, const TilingParams& p) {
  return std::to_string(p.j0_ang + slot / radial_count) + "," +
         std::to_string(p.j0_rad + slot % radial_count);
}

// ---------------------------------------------------------------- roundtrip

int cmd_roundtrip(const CliConfig& cfg, std::ostream& out) {
  const BandLimits lim = checked_limits(cfg);
  const FlagCoeffs c = random_flag_coeffs(lim, cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const FlagPlan plan(lim);
  const FlagCoeffs back = plan.forward(plan.inverse(c));
  const double seconds = elapsed(t0);
  double max_err = 0.0;
  double max_ref = 0.0;
  for (std::size_t n = 0; n < c.coeffs.size(); ++n) {
    max_err = std::max(max_err, std::abs(back.coeffs[n] - c.coeffs[n]));
    max_ref = std::max(max_ref, std::abs(c.coeffs[n]));
  }
  const double rel = max_ref > 0.0 ? max_err / max_ref : max_err;
  const bool ok = rel < 1e-9;
  if (cfg.format == "json") {
    json j;
    j["L"] = lim.L;
    j["P"] = lim.P;
    j["tau"] = lim.tau;
    j["seed"] = cfg.seed;
    j["max_abs_err"] = max_err;
    j["rel_err"] = rel;
    j["seconds"] = seconds;
    j["passed"] = ok;
    out << j.dump(2) << '\n';
  } else {
    out << "roundtrip L=" << lim.L << " P=" << lim.P << " tau=" << lim.tau << " seed=" << cfg.seed
        << '\n'
        << "  max_abs_err " << fmt6(max_err) << '\n'
        << "  rel_err     " << fmt6(rel) << '\n'
        << "  seconds     " << fmt6(seconds) << '\n'
        << (ok ? "  ok\n" : "  FAILED: relative error above 1e-9\n");
  }
  return ok ? kOk : kRuntimeError;
}

// ----------------------------------------------------------------- generate

int cmd_generate(const CliConfig& cfg, std::ostream& out) {
  if (cfg.domain == "sphere") {
    if (cfg.signal != "random") throw UsageError("generate: sphere signals support --signal random only");
    as_usage([&] { SphereCoeffs(cfg.L).validate(); return 0; });
    SphereCoeffs c = random_sphere_coeffs(cfg.L, cfg.seed, cfg.real);
    std::size_t bytes = 0;
    if (cfg.store == "coeffs") {
      bytes = save(c, cfg.output);
    } else {
      SphereGrid g = sht_inverse(c);
      if (cfg.noise > 0.0) {
        SignalRng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        for (auto& v : g.values) v += cfg.noise * gaussian(rng);
        g = sht_inverse(sht_forward(g));
      }
      bytes = save(g, cfg.output);
    }
    out << "wrote " << (cfg.store == "coeffs" ? "SphereCoeffs" : "SphereGrid") << " L=" << cfg.L
        << " to " << cfg.output << " (" << bytes << " bytes)\n";
    return kOk;
  }

  const BandLimits lim = checked_limits(cfg);
  const FlagPlan plan(lim);
  FlagCoeffs c(lim);
  if (cfg.signal == "random") {
    c = random_flag_coeffs(lim, cfg.seed, cfg.real);
  } else {
    if (cfg.width <= 0.0) throw UsageError("generate: --width must be positive");
    BlobFieldOptions opts;
    opts.count = cfg.blobs;
    opts.width = cfg.width;
    opts.r_min = cfg.r_min;
    opts.r_max = cfg.r_max;
    opts.seed = cfg.seed;
    c = plan.forward(as_usage([&] { return blob_field(lim, opts); }));
  }
  if (cfg.noise > 0.0) {
    BallGrid g = plan.inverse(c);
    SignalRng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    for (auto& v : g.values) v += cfg.noise * gaussian(rng);
    c = plan.forward(g);
  }
  std::size_t bytes = 0;
  if (cfg.store == "coeffs") {
    bytes = save(c, cfg.output);
  } else {
    bytes = save(plan.inverse(c), cfg.output);
  }
  out << "wrote " << (cfg.store == "coeffs" ? "FlagCoeffs" : "BallGrid") << " L=" << lim.L
      << " P=" << lim.P << " tau=" << lim.tau << " signal=" << cfg.signal << " to " << cfg.output
      << " (" << bytes << " bytes)\n";
  return kOk;
}

// ------------------------------------------------------ analyze / synthesize

struct PartRow {
  std::string scale;
  std::size_t L;
  std::size_t P;
  std::size_t samples;
  double energy;
};

void report_parts(const CliConfig& cfg, std::ostream& out, const std::string& what,
                  const std::vector<PartRow>& rows, double total, std::size_t total_samples) {
  double sum = 0.0;
  for (const auto& r : rows) sum += r.energy;
  if (cfg.format == "json") {
    json j;
    j["operation"] = what;
    j["multires"] = cfg.multires;
    json parts = json::array();
    for (const auto& r : rows) {
      parts.push_back({{"scale", r.scale}, {"L", r.L}, {"P", r.P}, {"samples", r.samples},
                       {"energy", r.energy}});
    }
    j["parts"] = parts;
    j["total_samples"] = total_samples;
    j["input_energy"] = total;
    j["energy_sum"] = sum;
    j["energy_rel_diff"] = total > 0.0 ? std::fabs(sum - total) / total : std::fabs(sum);
    out << j.dump(2) << '\n';
    return;
  }
  out << what << '\n' << "  scale        L     P   samples  energy\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-9s %4zu  %4zu  %8zu  %.10g\n", r.scale.c_str(), r.L, r.P,
                  r.samples, r.energy);
    out << line;
  }
  out << "  total samples " << total_samples << '\n'
      << "  input energy  " << fmt17(total) << '\n'
      << "  sum of parts  " << fmt17(sum) << '\n';
}

int analyze_ball(const CliConfig& cfg, const FlagCoeffs& f, std::ostream& out) {
  const auto kernels = as_usage([&] { return build_flaglet_kernels(f.limits, tiling(cfg)); });
  FlagletTransform ft(kernels);
  const FlagletDecomposition d = ft.analyze(f, cfg.multires);
  const auto e = ft.part_energies(d);
  const std::size_t bytes = save(d, cfg.output);
  std::vector<PartRow> rows;
  rows.push_back({"scaling", d.scaling.limits.L, d.scaling.limits.P, d.scaling.values.size(), e[0]});
  for (std::size_t s = 0; s < d.wavelets.size(); ++s) {
    const auto& w = d.wavelets[s];
    rows.push_back({scale_label(s, d.radial_scale_count(), d.params), w.limits.L, w.limits.P,
                    w.values.size(), e[s + 1]});
  }
  report_parts(cfg, out, "flaglet analysis -> " + cfg.output + " (" + std::to_string(bytes) + " bytes)",
               rows, coefficient_energy(f.coeffs), d.sample_count());
  return kOk;
}

int analyze_sphere(const CliConfig& cfg, const SphereCoeffs& f, std::ostream& out) {
  const auto kernels = as_usage([&] { return build_sphere_kernels(f.L, tiling(cfg)); });
  SphereWaveletTransform wt(kernels);
  const SphereDecomposition d = wt.analyze(f, cfg.multires);
  const std::size_t bytes = save(d, cfg.output);
  std::vector<PartRow> rows;
  auto energy = [](const SphereGrid& g) { return coefficient_energy(sht_forward(g).coeffs); };
  rows.push_back({"scaling", d.scaling.L, 1, d.scaling.values.size(), energy(d.scaling)});
  for (std::size_t s = 0; s < d.wavelets.size(); ++s) {
    rows.push_back({std::to_string(d.j0 + s), d.wavelets[s].L, 1, d.wavelets[s].values.size(),
                    energy(d.wavelets[s])});
  }
  report_parts(cfg, out, "sphere wavelet analysis -> " + cfg.output + " (" + std::to_string(bytes) + " bytes)",
               rows, coefficient_energy(f.coeffs), d.sample_count());
  return kOk;
}

int cmd_analyze(const CliConfig& cfg, std::ostream& out) {
  ContainerObject obj = load(cfg.input);
  if (auto* g = std::get_if<BallGrid>(&obj)) return analyze_ball(cfg, flag_forward(*g), out);
  if (auto* c = std::get_if<FlagCoeffs>(&obj)) return analyze_ball(cfg, *c, out);
  if (auto* g = std::get_if<SphereGrid>(&obj)) return analyze_sphere(cfg, sht_forward(*g), out);
  if (auto* c = std::get_if<SphereCoeffs>(&obj)) return analyze_sphere(cfg, *c, out);
  throw IoError(IoErrc::KindMismatch, "analyze: expected a grid or coefficients in " + cfg.input +
                                          ", found " + kind_name(kind_of(obj)));
}

int cmd_synthesize(const CliConfig& cfg, std::ostream& out) {
  ContainerObject obj = load(cfg.input);
  double energy = 0.0;
  std::string kind;
  std::size_t bytes = 0;
  if (auto* d = std::get_if<FlagletDecomposition>(&obj)) {
    const FlagCoeffs f = flaglet_synthesize(*d, build_flaglet_kernels(d->limits, d->params));
    energy = coefficient_energy(f.coeffs);
    if (cfg.coeffs_out) {
      kind = "FlagCoeffs";
      bytes = save(f, cfg.output);
    } else {
      kind = "BallGrid";
      bytes = save(flag_inverse(f), cfg.output);
    }
  } else if (auto* d = std::get_if<SphereDecomposition>(&obj)) {
    const SphereCoeffs f =
        sphere_synthesize(*d, build_sphere_kernels(d->L, {d->lambda, 2.0, d->j0, 0}));
    energy = coefficient_energy(f.coeffs);
    if (cfg.coeffs_out) {
      kind = "SphereCoeffs";
      bytes = save(f, cfg.output);
    } else {
      kind = "SphereGrid";
      bytes = save(sht_inverse(f), cfg.output);
    }
  } else {
    throw IoError(IoErrc::KindMismatch, "synthesize: expected a Decomposition in " + cfg.input +
                                            ", found " + kind_name(kind_of(obj)));
  }
  if (cfg.format == "json") {
    json j;
    j["operation"] = "synthesize";
    j["output"] = cfg.output;
    j["kind"] = kind;
    j["bytes"] = bytes;
    j["energy"] = energy;
    out << j.dump(2) << '\n';
  } else {
    out << "synthesized " << kind << " -> " << cfg.output << " (" << bytes << " bytes)\n"
        << "  energy " << fmt17(energy) << '\n';
  }
  return kOk;
}

// ------------------------------------------------------------------ denoise

int cmd_denoise(const CliConfig& cfg, std::ostream& out) {
  if (!(cfg.threshold >= 0.0)) throw UsageError("denoise: --threshold must be non-negative");
  const ThresholdMode mode = cfg.mode == "soft" ? ThresholdMode::Soft : ThresholdMode::Hard;
  ContainerObject obj = load(cfg.input);
  FlagletDecomposition d;
  std::unique_ptr<FlagletTransform> ft;
  if (auto* g = std::get_if<BallGrid>(&obj)) {
    ft = std::make_unique<FlagletTransform>(
        as_usage([&] { return build_flaglet_kernels(g->limits, tiling(cfg)); }));
    d = ft->analyze(flag_forward(*g), cfg.multires);
  } else if (auto* c = std::get_if<FlagCoeffs>(&obj)) {
    ft = std::make_unique<FlagletTransform>(
        as_usage([&] { return build_flaglet_kernels(c->limits, tiling(cfg)); }));
    d = ft->analyze(*c, cfg.multires);
  } else if (auto* dec = std::get_if<FlagletDecomposition>(&obj)) {
    ft = std::make_unique<FlagletTransform>(build_flaglet_kernels(dec->limits, dec->params));
    d = std::move(*dec);
  } else {
    throw IoError(IoErrc::KindMismatch, "denoise: expected a BallGrid, FlagCoeffs or ball Decomposition in " +
                                            cfg.input + ", found " + kind_name(kind_of(obj)));
  }
  const FlagletDecomposition t = threshold_denoise(d, cfg.threshold, mode);
  std::size_t total = 0;
  std::size_t zeroed = 0;
  for (const auto& w : t.wavelets) {
    total += w.values.size();
    zeroed += static_cast<std::size_t>(
        std::count_if(w.values.begin(), w.values.end(), [](const cplx& v) { return v == cplx{}; }));
  }
  const FlagCoeffs f = ft->synthesize(t);
  const std::size_t bytes = save(flag_inverse(f), cfg.output);
  if (cfg.format == "json") {
    json j;
    j["operation"] = "denoise";
    j["threshold"] = cfg.threshold;
    j["mode"] = cfg.mode;
    j["wavelet_samples"] = total;
    j["zeroed_samples"] = zeroed;
    j["output_energy"] = coefficient_energy(f.coeffs);
    j["output"] = cfg.output;
    j["bytes"] = bytes;
    out << j.dump(2) << '\n';
  } else {
    out << "denoise threshold=" << cfg.threshold << " mode=" << cfg.mode << '\n'
        << "  zeroed " << zeroed << " of " << total << " wavelet samples\n"
        << "  output energy " << fmt17(coefficient_energy(f.coeffs)) << '\n'
        << "  wrote BallGrid -> " << cfg.output << " (" << bytes << " bytes)\n";
  }
  return kOk;
}

// -------------------------------------------------------------------- slice

struct GridView {
  std::size_t L;
  std::size_t P;
  const std::vector<cplx>* values;
};

std::pair<std::size_t, std::size_t> parse_scale(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stoul(s), 0};
    return {std::stoul(s.substr(0, comma)), std::stoul(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("slice: --part must be 'scaling', 'j' or 'j,jp', got '" + s + "'");
  }
}

GridView select_grid(const ContainerObject& obj, const std::string& part, const std::string& input) {
  if (auto* g = std::get_if<BallGrid>(&obj)) return {g->limits.L, g->limits.P, &g->values};
  if (auto* g = std::get_if<SphereGrid>(&obj)) return {g->L, 1, &g->values};
  if (auto* d = std::get_if<FlagletDecomposition>(&obj)) {
    if (part == "scaling") return {d->scaling.limits.L, d->scaling.limits.P, &d->scaling.values};
    const auto [j, jp] = parse_scale(part);
    if (j < d->params.j0_ang || j > d->J_ang || jp < d->params.j0_rad || jp > d->J_rad) {
      throw RuntimeFailure("slice: scale " + part + " is not in the decomposition");
    }
    const BallGrid& w = d->wavelet(j, jp);
    return {w.limits.L, w.limits.P, &w.values};
  }
  if (auto* d = std::get_if<SphereDecomposition>(&obj)) {
    if (part == "scaling") return {d->scaling.L, 1, &d->scaling.values};
    const auto [j, jp] = parse_scale(part);
    if (j < d->j0 || j > d->J || jp != 0) {
      throw RuntimeFailure("slice: scale " + part + " is not in the decomposition");
    }
    const SphereGrid& w = d->wavelets[j - d->j0];
    return {w.L, 1, &w.values};
  }
  throw IoError(IoErrc::KindMismatch, "slice: expected a grid or Decomposition in " + input +
                                          ", found " + kind_name(kind_of(obj)));
}

double component(const cplx& v, const std::string& which) {
  if (which == "im") return v.imag();
  if (which == "abs") return std::abs(v);
  return v.real();
}

void write_pgm(std::ostream& os, const std::vector<std::vector<double>>& a) {
  double lo = a[0][0];
  double hi = a[0][0];
  for (const auto& row : a) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  os << "P5\n" << a[0].size() << ' ' << a.size() << "\n255\n";
  for (const auto& row : a) {
    for (double v : row) {
      const double s = hi > lo ? (v - lo) / (hi - lo) : 0.0;
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
    }
  }
}

void write_csv(std::ostream& os, const std::vector<std::vector<double>>& a) {
  for (const auto& row : a) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << fmt17(row[c]);
    os << "\r\n";
  }
}

int cmd_slice(const CliConfig& cfg, std::ostream& out) {
  std::string image = cfg.image;
  if (image.empty()) {
    image = cfg.output.size() >= 4 && cfg.output.substr(cfg.output.size() - 4) == ".pgm" ? "pgm" : "csv";
  }
  if (image == "pgm" && cfg.output.empty()) throw UsageError("slice: PGM output needs --output");
  const ContainerObject obj = load(cfg.input);
  const GridView g = select_grid(obj, cfg.part, cfg.input);
  const std::size_t nphi = sphere_nphi(g.L);
  const std::size_t shell = sphere_sample_count(g.L);
  std::vector<std::vector<double>> a;
  if (cfg.axis == "shell") {
    if (cfg.index >= g.P) {
      throw RuntimeFailure("slice: shell index " + std::to_string(cfg.index) + " out of range [0, " +
                           std::to_string(g.P) + ")");
    }
    a.assign(g.L, std::vector<double>(nphi));
    for (std::size_t t = 0; t < g.L; ++t) {
      for (std::size_t k = 0; k < nphi; ++k) {
        a[t][k] = component((*g.values)[cfg.index * shell + t * nphi + k], cfg.component);
      }
    }
  } else {
    if (cfg.index >= nphi) {
      throw RuntimeFailure("slice: longitude index " + std::to_string(cfg.index) + " out of range [0, " +
                           std::to_string(nphi) + ")");
    }
    a.assign(g.P, std::vector<double>(g.L));
    for (std::size_t i = 0; i < g.P; ++i) {
      for (std::size_t t = 0; t < g.L; ++t) {
        a[i][t] = component((*g.values)[i * shell + t * nphi + cfg.index], cfg.component);
      }
    }
  }

  if (cfg.output.empty()) {
    write_csv(out, a);
    return kOk;
  }
  std::ofstream os(cfg.output, std::ios::binary | std::ios::trunc);
  if (!os) throw RuntimeFailure("slice: cannot open " + cfg.output + " for writing");
  if (image == "pgm") {
    write_pgm(os, a);
  } else {
    write_csv(os, a);
  }
  os.flush();
  if (!os) throw RuntimeFailure("slice: failed writing " + cfg.output);
  out << "slice " << cfg.axis << ' ' << cfg.index << ": " << a.size() << 'x' << a[0].size() << ' '
      << image << " -> " << cfg.output << '\n';
  return kOk;
}

// -------------------------------------------------------------------- bench

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_bench(const CliConfig& cfg, std::ostream& out) {
  if (cfg.runs < 5) throw UsageError("bench: --runs must be at least 5");
  const BandLimits lim = checked_limits(cfg);
  FlagletTransform ft(as_usage([&] { return build_flaglet_kernels(lim, tiling(cfg)); }));
  const FlagCoeffs f = random_flag_coeffs(lim, cfg.seed);
  struct Result {
    double seconds;
    std::size_t samples;
  };
  auto measure = [&](bool multires) {
    const std::size_t samples = ft.analyze(f, multires).sample_count();  // warm-up builds the plans
    std::vector<double> t;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const FlagCoeffs back = ft.synthesize(ft.analyze(f, multires));
      t.push_back(elapsed(t0));
    }
    return Result{median(t), samples};
  };
  const Result full = measure(false);
  const Result multi = measure(true);
  const double speedup = multi.seconds > 0.0 ? full.seconds / multi.seconds : 0.0;
  if (cfg.format == "json") {
    json j;
    j["L"] = lim.L;
    j["P"] = lim.P;
    j["tau"] = lim.tau;
    j["runs"] = cfg.runs;
    j["full"] = {{"median_seconds", full.seconds}, {"samples", full.samples}};
    j["multires"] = {{"median_seconds", multi.seconds}, {"samples", multi.samples}};
    j["speedup"] = speedup;
    out << j.dump(2) << '\n';
  } else {
    char line[160];
    out << "bench analysis+synthesis L=" << lim.L << " P=" << lim.P << ", median of " << cfg.runs
        << " runs\n"
        << "  mode       median_s    samples\n";
    std::snprintf(line, sizeof line, "  full      %9.4f  %9zu\n", full.seconds, full.samples);
    out << line;
    std::snprintf(line, sizeof line, "  multires  %9.4f  %9zu\n", multi.seconds, multi.samples);
    out << line << "  speedup " << fmt6(speedup) << '\n';
  }
  return kOk;
}

// ------------------------------------------------------------------ kernels

int cmd_kernels(const CliConfig& cfg, std::ostream& out) {
  std::ostringstream csv;
  if (cfg.domain == "sphere") {
    const auto k = as_usage([&] { return build_sphere_kernels(cfg.L, tiling(cfg)); });
    csv << "l,eta";
    for (std::size_t j = k.j0; j <= k.J; ++j) csv << ",kappa_" << j;
    csv << ",eta2_plus_sum_kappa2\r\n";
    for (std::size_t l = 0; l < k.L; ++l) {
      double sum = k.eta[l] * k.eta[l];
      csv << l << ',' << fmt17(k.eta[l]);
      for (const auto& kap : k.kappas) {
        csv << ',' << fmt17(kap[l]);
        sum += kap[l] * kap[l];
      }
      csv << ',' << fmt17(sum) << "\r\n";
    }
    if (!cfg.container.empty()) save(k, cfg.container);
  } else {
    const BandLimits lim = checked_limits(cfg);
    const auto k = as_usage([&] { return build_flaglet_kernels(lim, tiling(cfg)); });
    csv << "l,p,phi";
    for (std::size_t s = 0; s < k.psis.size(); ++s) {
      csv << ",psi_" << (k.params.j0_ang + s / k.radial_scale_count()) << '_'
          << (k.params.j0_rad + s % k.radial_scale_count());
    }
    csv << ",phi2_plus_sum_psi2\r\n";
    for (std::size_t l = 0; l < k.L; ++l) {
      for (std::size_t p = 0; p < k.P; ++p) {
        const std::size_t n = l * k.P + p;
        double sum = k.phi[n] * k.phi[n];
        csv << l << ',' << p << ',' << fmt17(k.phi[n]);
        for (const auto& psi : k.psis) {
          csv << ',' << fmt17(psi[n]);
          sum += psi[n] * psi[n];
        }
        csv << ',' << fmt17(sum) << "\r\n";
      }
    }
    if (!cfg.container.empty()) save(k, cfg.container);
  }
  if (cfg.output.empty()) {
    out << csv.str();
    return kOk;
  }
  std::ofstream os(cfg.output, std::ios::binary | std::ios::trunc);
  os << csv.str();
  os.flush();
  if (!os) throw RuntimeFailure("kernels: failed writing " + cfg.output);
  return kOk;
}

// --------------------------------------------------------------------- info

int cmd_info(const CliConfig& cfg, std::ostream& out) {
  const ContainerObject obj = load(cfg.input);
  json j;
  j["kind"] = kind_name(kind_of(obj));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SphereGrid> || std::is_same_v<T, SphereCoeffs>) {
          j["L"] = v.L;
        } else if constexpr (std::is_same_v<T, BallGrid> || std::is_same_v<T, FlagCoeffs>) {
          j["L"] = v.limits.L;
          j["P"] = v.limits.P;
          j["tau"] = v.limits.tau;
        } else if constexpr (std::is_same_v<T, SphereKernels>) {
          j["L"] = v.L;
          j["lambda"] = v.lambda;
          j["j0"] = v.j0;
          j["J"] = v.J;
        } else if constexpr (std::is_same_v<T, FlagletKernels>) {
          j["L"] = v.L;
          j["P"] = v.P;
          j["lambda"] = v.params.lambda;
          j["nu"] = v.params.nu;
          j["J_ang"] = v.J_ang;
          j["J_rad"] = v.J_rad;
        } else if constexpr (std::is_same_v<T, SphereDecomposition>) {
          j["domain"] = "sphere";
          j["L"] = v.L;
          j["lambda"] = v.lambda;
          j["j0"] = v.j0;
          j["J"] = v.J;
          j["multires"] = v.multires;
          j["samples"] = v.sample_count();
        } else {
          j["domain"] = "ball";
          j["L"] = v.limits.L;
          j["P"] = v.limits.P;
          j["tau"] = v.limits.tau;
          j["lambda"] = v.params.lambda;
          j["nu"] = v.params.nu;
          j["J_ang"] = v.J_ang;
          j["J_rad"] = v.J_rad;
          j["multires"] = v.multires;
          j["samples"] = v.sample_count();
        }
      },
      obj);
  if (cfg.format == "json") {
    out << j.dump(2) << '\n';
  } else {
    for (const auto& [key, value] : j.items()) out << key << ' ' << value.dump() << '\n';
  }
  return kOk;
}

// --------------------------------------------------------------------- main

void add_limits(CLI::App* app, CliConfig& cfg) {
  app->add_option("--L", cfg.L, "angular band limit")->capture_default_str();
  app->add_option("--P", cfg.P, "radial band limit")->capture_default_str();
  app->add_option("--tau", cfg.tau, "radial scale factor")->capture_default_str();
}

void add_tiling(CLI::App* app, CliConfig& cfg) {
  app->add_option("--lambda", cfg.lambda, "angular dilation")->capture_default_str();
  app->add_option("--nu", cfg.nu, "radial dilation")->capture_default_str();
  app->add_option("--j0-ang", cfg.j0_ang, "minimum angular scale")->capture_default_str();
  app->add_option("--j0-rad", cfg.j0_rad, "minimum radial scale")->capture_default_str();
}

void add_format(CLI::App* app, CliConfig& cfg) {
  app->add_option("--format", cfg.format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Fourier-Laguerre and flaglet transforms on the ball", "flagtool"};
  app.require_subcommand(1);

  auto* rt = app.add_subcommand("roundtrip", "random band-limited signal through inverse then forward");
  add_limits(rt, cfg);
  rt->add_option("--seed", cfg.seed, "signal seed")->capture_default_str();
  add_format(rt, cfg);

  auto* gen = app.add_subcommand("generate", "write a test signal as an FLG1 file");
  add_limits(gen, cfg);
  gen->add_option("--seed", cfg.seed)->capture_default_str();
  gen->add_option("--domain", cfg.domain)->check(CLI::IsMember({"ball", "sphere"}))->capture_default_str();
  gen->add_option("--signal", cfg.signal)->check(CLI::IsMember({"random", "blobs"}))->capture_default_str();
  gen->add_option("--store", cfg.store, "write samples or coefficients")
      ->check(CLI::IsMember({"grid", "coeffs"}))
      ->capture_default_str();
  gen->add_flag("--real", cfg.real, "conjugate-symmetric coefficients (real samples)");
  gen->add_option("--blobs", cfg.blobs, "number of Gaussian blobs")->capture_default_str();
  gen->add_option("--width", cfg.width, "blob width")->capture_default_str();
  gen->add_option("--r-min", cfg.r_min, "smallest blob centre radius")->capture_default_str();
  gen->add_option("--r-max", cfg.r_max, "largest blob centre radius (0: automatic)")->capture_default_str();
  gen->add_option("--noise", cfg.noise, "standard deviation of added Gaussian sample noise")
      ->capture_default_str();
  gen->add_option("-o,--output", cfg.output)->required();

  auto* an = app.add_subcommand("analyze", "wavelet decomposition of a grid or coefficient file");
  add_tiling(an, cfg);
  an->add_flag("--multires", cfg.multires, "store each scale at its own band limits");
  an->add_option("-i,--input", cfg.input)->required();
  an->add_option("-o,--output", cfg.output)->required();
  add_format(an, cfg);

  auto* syn = app.add_subcommand("synthesize", "reconstruct a signal from a decomposition");
  syn->add_option("-i,--input", cfg.input)->required();
  syn->add_option("-o,--output", cfg.output)->required();
  syn->add_flag("--coeffs", cfg.coeffs_out, "write coefficients instead of samples");
  add_format(syn, cfg);

  auto* dn = app.add_subcommand("denoise", "threshold flaglet coefficients and resynthesize");
  add_tiling(dn, cfg);
  dn->add_flag("--multires", cfg.multires);
  dn->add_option("--threshold", cfg.threshold)->required();
  dn->add_option("--mode", cfg.mode)->check(CLI::IsMember({"hard", "soft"}))->capture_default_str();
  dn->add_option("-i,--input", cfg.input)->required();
  dn->add_option("-o,--output", cfg.output)->required();
  add_format(dn, cfg);

  auto* sl = app.add_subcommand("slice", "extract a shell or constant-longitude slice as CSV or PGM");
  sl->add_option("-i,--input", cfg.input)->required();
  sl->add_option("-o,--output", cfg.output, "output file (CSV to stdout if omitted)");
  sl->add_option("--axis", cfg.axis)->check(CLI::IsMember({"shell", "phi"}))->capture_default_str();
  sl->add_option("--index", cfg.index, "shell or longitude index")->capture_default_str();
  sl->add_option("--part", cfg.part, "for decompositions: scaling, j or j,jp")->capture_default_str();
  sl->add_option("--component", cfg.component)->check(CLI::IsMember({"re", "im", "abs"}))->capture_default_str();
  sl->add_option("--image", cfg.image, "csv or pgm (default from the output extension)")
      ->check(CLI::IsMember({"csv", "pgm"}));

  auto* be = app.add_subcommand("bench", "time full and multiresolution analysis plus synthesis");
  add_limits(be, cfg);
  add_tiling(be, cfg);
  be->add_option("--seed", cfg.seed)->capture_default_str();
  be->add_option("--runs", cfg.runs)->capture_default_str();
  add_format(be, cfg);

  auto* ke = app.add_subcommand("kernels", "tabulate wavelet and scaling windows as CSV");
  add_limits(ke, cfg);
  add_tiling(ke, cfg);
  ke->add_option("--domain", cfg.domain)->check(CLI::IsMember({"ball", "sphere"}))->capture_default_str();
  ke->add_option("-o,--output", cfg.output, "CSV file (stdout if omitted)");
  ke->add_option("--container", cfg.container, "also write the kernels as an FLG1 file");

  auto* in = app.add_subcommand("info", "describe an FLG1 file");
  in->add_option("-i,--input", cfg.input)->required();
  add_format(in, cfg);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (rt->parsed()) return cmd_roundtrip(cfg, out);
    if (gen->parsed()) return cmd_generate(cfg, out);
    if (an->parsed()) return cmd_analyze(cfg, out);
    if (syn->parsed()) return cmd_synthesize(cfg, out);
    if (dn->parsed()) return cmd_denoise(cfg, out);
    if (sl->parsed()) return cmd_slice(cfg, out);
    if (be->parsed()) return cmd_bench(cfg, out);
    if (ke->parsed()) return cmd_kernels(cfg, out);
    if (in->parsed()) return cmd_info(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace flag::cli
