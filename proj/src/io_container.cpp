#include "flag/io_container.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <istream>
#include <ostream>

#include "flag/error.hpp"

namespace flag {
namespace {

constexpr std::array<char, 4> kMagic = {'F', 'L', 'G', '1'};
constexpr std::uint32_t kSphereDomain = 1;
constexpr std::uint32_t kBallDomain = 2;
constexpr std::uint32_t kMultiresFlag = 1;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xffu));
  }
  void size(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
      throw IoError(IoErrc::InvalidHeader, "FLG1: field exceeds u32 range");
    }
    u32(static_cast<std::uint32_t>(v));
  }
  void reals(const std::vector<double>& v) {
    for (double x : v) f64(x);
  }
  void complexes(const std::vector<cplx>& v) {
    for (const auto& z : v) {
      f64(z.real());
      f64(z.imag());
    }
  }
  void magic() {
    for (char c : kMagic) out_.push_back(static_cast<std::byte>(c));
  }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw IoError(IoErrc::Truncated, std::string("FLG1: truncated ") + what + ": expected " +
                                           std::to_string(pos_ + n) + " bytes, got " +
                                           std::to_string(bytes_.size()));
    }
  }
  std::uint32_t u32() {
    need(4, "header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64_unchecked() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::to_integer<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  double f64() {
    need(8, "header");
    return f64_unchecked();
  }
  std::vector<double> reals(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = f64_unchecked();
    return v;
  }
  std::vector<cplx> complexes(std::size_t n) {
    std::vector<cplx> v(n);
    for (auto& z : v) {
      const double re = f64_unchecked();
      const double im = f64_unchecked();
      z = {re, im};
    }
    return v;
  }
  /// Checks that exactly `values` reals remain.
  void expect_payload(std::size_t values) const {
    const std::size_t expected = values * 8;
    const std::size_t remaining = bytes_.size() - pos_;
    if (remaining < expected) {
      throw IoError(IoErrc::Truncated, "FLG1: truncated payload: expected " +
                                           std::to_string(expected) + " bytes, got " +
                                           std::to_string(remaining));
    }
    if (remaining > expected) {
      throw IoError(IoErrc::LengthMismatch, "FLG1: payload length mismatch: expected " +
                                                std::to_string(expected) + " bytes, found " +
                                                std::to_string(remaining));
    }
  }
  void skip_magic() { pos_ += kMagic.size(); }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

void header_check(bool ok, const std::string& what) {
  if (!ok) throw IoError(IoErrc::InvalidHeader, "FLG1: invalid header: " + what);
}

std::size_t checked_band_limit(std::uint32_t L) {
  header_check(L >= 1 && L <= kMaxSphereBandLimit, "band limit L out of range");
  return L;
}

// Upper bound on P accepted from a file; keeps a corrupt header from
// requesting an absurd allocation before the payload length check.
constexpr std::uint32_t kMaxRadialBandLimit = 1u << 20;

std::size_t checked_radial(std::uint32_t P) {
  header_check(P >= 1 && P <= kMaxRadialBandLimit, "radial band limit P out of range");
  return P;
}

// Encoders per type

void encode(Writer& w, const SphereGrid& g) {
  g.validate();
  w.size(g.L);
  w.complexes(g.values);
}

void encode(Writer& w, const SphereCoeffs& c) {
  c.validate();
  w.size(c.L);
  w.complexes(c.coeffs);
}

void encode(Writer& w, const BallGrid& g) {
  g.validate();
  w.size(g.limits.L);
  w.size(g.limits.P);
  w.f64(g.limits.tau);
  w.complexes(g.values);
}

void encode(Writer& w, const FlagCoeffs& c) {
  c.validate();
  w.size(c.limits.L);
  w.size(c.limits.P);
  w.f64(c.limits.tau);
  w.complexes(c.coeffs);
}

void encode(Writer& w, const SphereKernels& k) {
  k.validate();
  w.size(k.L);
  w.f64(k.lambda);
  w.size(k.j0);
  w.size(k.J);
  w.reals(k.eta);
  for (const auto& kappa : k.kappas) w.reals(kappa);
}

void encode(Writer& w, const FlagletKernels& k) {
  k.validate();
  w.size(k.L);
  w.size(k.P);
  w.f64(k.params.lambda);
  w.f64(k.params.nu);
  w.size(k.params.j0_ang);
  w.size(k.params.j0_rad);
  w.size(k.J_ang);
  w.size(k.J_rad);
  w.reals(k.phi);
  for (const auto& psi : k.psis) w.reals(psi);
}

void encode(Writer& w, const SphereDecomposition& d) {
  d.validate();
  w.u32(kSphereDomain);
  w.size(d.L);
  w.u32(1);
  w.f64(1.0);
  w.f64(d.lambda);
  w.f64(0.0);
  w.size(d.j0);
  w.u32(0);
  w.size(d.J);
  w.u32(0);
  w.u32(d.multires ? kMultiresFlag : 0);
  w.size(d.wavelets.size() + 1);
  w.size(d.scaling.L);
  w.u32(1);
  for (const auto& g : d.wavelets) {
    w.size(g.L);
    w.u32(1);
  }
  w.complexes(d.scaling.values);
  for (const auto& g : d.wavelets) w.complexes(g.values);
}

void encode(Writer& w, const FlagletDecomposition& d) {
  d.validate();
  w.u32(kBallDomain);
  w.size(d.limits.L);
  w.size(d.limits.P);
  w.f64(d.limits.tau);
  w.f64(d.params.lambda);
  w.f64(d.params.nu);
  w.size(d.params.j0_ang);
  w.size(d.params.j0_rad);
  w.size(d.J_ang);
  w.size(d.J_rad);
  w.u32(d.multires ? kMultiresFlag : 0);
  w.size(d.wavelets.size() + 1);
  w.size(d.scaling.limits.L);
  w.size(d.scaling.limits.P);
  for (const auto& g : d.wavelets) {
    w.size(g.limits.L);
    w.size(g.limits.P);
  }
  w.complexes(d.scaling.values);
  for (const auto& g : d.wavelets) w.complexes(g.values);
}

// Decoders per kind

ContainerObject decode_sphere_grid(Reader& r) {
  SphereGrid g;
  g.L = checked_band_limit(r.u32());
  const std::size_t n = sphere_sample_count(g.L);
  r.expect_payload(2 * n);
  g.values = r.complexes(n);
  return g;
}

ContainerObject decode_sphere_coeffs(Reader& r) {
  SphereCoeffs c;
  c.L = checked_band_limit(r.u32());
  r.expect_payload(2 * c.L * c.L);
  c.coeffs = r.complexes(c.L * c.L);
  return c;
}

BandLimits decode_limits(Reader& r) {
  BandLimits lim;
  lim.L = checked_band_limit(r.u32());
  lim.P = checked_radial(r.u32());
  lim.tau = r.f64();
  header_check(std::isfinite(lim.tau) && lim.tau > 0.0, "tau must be finite and positive");
  return lim;
}

ContainerObject decode_ball_grid(Reader& r) {
  BallGrid g;
  g.limits = decode_limits(r);
  const std::size_t n = ball_sample_count(g.limits.L, g.limits.P);
  r.expect_payload(2 * n);
  g.values = r.complexes(n);
  return g;
}

ContainerObject decode_flag_coeffs(Reader& r) {
  FlagCoeffs c;
  c.limits = decode_limits(r);
  const std::size_t n = c.limits.P * c.limits.L * c.limits.L;
  r.expect_payload(2 * n);
  c.coeffs = r.complexes(n);
  return c;
}

ContainerObject decode_sphere_kernels(Reader& r) {
  SphereKernels k;
  k.L = checked_band_limit(r.u32());
  k.lambda = r.f64();
  k.j0 = r.u32();
  k.J = r.u32();
  header_check(k.lambda > 1.0 && std::isfinite(k.lambda), "lambda must exceed 1");
  header_check(k.J >= k.j0 && k.J < 64, "scale range");
  const std::size_t scales = k.J - k.j0 + 1;
  r.expect_payload(k.L * (scales + 1));
  k.eta = r.reals(k.L);
  for (std::size_t s = 0; s < scales; ++s) k.kappas.push_back(r.reals(k.L));
  return k;
}

ContainerObject decode_flaglet_kernels(Reader& r) {
  FlagletKernels k;
  k.L = checked_band_limit(r.u32());
  k.P = checked_radial(r.u32());
  k.params.lambda = r.f64();
  k.params.nu = r.f64();
  k.params.j0_ang = r.u32();
  k.params.j0_rad = r.u32();
  k.J_ang = r.u32();
  k.J_rad = r.u32();
  header_check(k.params.lambda > 1.0 && k.params.nu > 1.0, "dilations must exceed 1");
  header_check(k.J_ang >= k.params.j0_ang && k.J_ang < 64, "angular scale range");
  header_check(k.J_rad >= k.params.j0_rad && k.J_rad < 64, "radial scale range");
  const std::size_t scales = k.angular_scale_count() * k.radial_scale_count();
  const std::size_t n = k.L * k.P;
  r.expect_payload(n * (scales + 1));
  k.phi = r.reals(n);
  for (std::size_t s = 0; s < scales; ++s) k.psis.push_back(r.reals(n));
  return k;
}

ContainerObject decode_decomposition(Reader& r) {
  const std::uint32_t domain = r.u32();
  header_check(domain == kSphereDomain || domain == kBallDomain, "unknown decomposition domain");
  BandLimits lim;
  lim.L = checked_band_limit(r.u32());
  lim.P = checked_radial(r.u32());
  lim.tau = r.f64();
  header_check(std::isfinite(lim.tau) && lim.tau > 0.0, "tau must be finite and positive");
  TilingParams params;
  params.lambda = r.f64();
  params.nu = r.f64();
  params.j0_ang = r.u32();
  params.j0_rad = r.u32();
  const std::size_t J_ang = r.u32();
  const std::size_t J_rad = r.u32();
  const std::uint32_t flags = r.u32();
  const std::size_t parts = r.u32();
  header_check(params.lambda > 1.0, "lambda must exceed 1");
  header_check(J_ang >= params.j0_ang && J_ang < 64, "angular scale range");
  header_check(J_rad >= params.j0_rad && J_rad < 64, "radial scale range");
  const std::size_t scales = (J_ang - params.j0_ang + 1) * (J_rad - params.j0_rad + 1);
  header_check(parts == scales + 1, "part count does not match scale ranges");
  const bool multires = (flags & kMultiresFlag) != 0;

  std::vector<std::pair<std::size_t, std::size_t>> shapes(parts);
  std::size_t total = 0;
  for (auto& [pl, pp] : shapes) {
    pl = r.u32();
    pp = r.u32();
    header_check(pl >= 1 && pl <= lim.L && pp >= 1 && pp <= lim.P, "part band limits");
    total += ball_sample_count(pl, pp);
  }
  r.expect_payload(2 * total);

  if (domain == kSphereDomain) {
    header_check(lim.P == 1 && J_rad == 0 && params.j0_rad == 0, "sphere decomposition radial fields");
    SphereDecomposition d;
    d.L = lim.L;
    d.lambda = params.lambda;
    d.j0 = params.j0_ang;
    d.J = J_ang;
    d.multires = multires;
    for (std::size_t s = 0; s < parts; ++s) {
      SphereGrid g;
      g.L = shapes[s].first;
      g.values = r.complexes(sphere_sample_count(g.L));
      if (s == 0) {
        d.scaling = std::move(g);
      } else {
        d.wavelets.push_back(std::move(g));
      }
    }
    return d;
  }
  header_check(params.nu > 1.0, "nu must exceed 1");
  FlagletDecomposition d;
  d.limits = lim;
  d.params = params;
  d.J_ang = J_ang;
  d.J_rad = J_rad;
  d.multires = multires;
  for (std::size_t s = 0; s < parts; ++s) {
    BallGrid g;
    g.limits = {shapes[s].first, shapes[s].second, lim.tau};
    g.values = r.complexes(ball_sample_count(g.limits.L, g.limits.P));
    if (s == 0) {
      d.scaling = std::move(g);
    } else {
      d.wavelets.push_back(std::move(g));
    }
  }
  return d;
}

}  // namespace

ContainerKind kind_of(const ContainerObject& obj) {
  switch (obj.index()) {
    case 0: return ContainerKind::SphereGrid;
    case 1: return ContainerKind::SphereCoeffs;
    case 2: return ContainerKind::BallGrid;
    case 3: return ContainerKind::FlagCoeffs;
    case 4: return ContainerKind::SphereKernels;
    case 5: return ContainerKind::FlagletKernels;
    default: return ContainerKind::Decomposition;
  }
}

const char* kind_name(ContainerKind kind) {
  switch (kind) {
    case ContainerKind::SphereGrid: return "SphereGrid";
    case ContainerKind::SphereCoeffs: return "SphereCoeffs";
    case ContainerKind::BallGrid: return "BallGrid";
    case ContainerKind::FlagCoeffs: return "FlagCoeffs";
    case ContainerKind::SphereKernels: return "SphereKernels";
    case ContainerKind::FlagletKernels: return "FlagletKernels";
    case ContainerKind::Decomposition: return "Decomposition";
  }
  return "unknown";
}

std::vector<std::byte> encode_container(const ContainerObject& obj) {
  Writer w;
  w.magic();
  w.u32(kContainerVersion);
  w.u32(static_cast<std::uint32_t>(kind_of(obj)));
  std::visit([&w](const auto& value) { encode(w, value); }, obj);
  return w.take();
}

ContainerObject decode_container(std::span<const std::byte> bytes) {
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw IoError(IoErrc::MagicMismatch, "FLG1: bad magic, not an FLG1 container");
  }
  Reader r(bytes);
  r.skip_magic();
  const std::uint32_t version = r.u32();
  if (version != kContainerVersion) {
    throw IoError(IoErrc::UnsupportedVersion,
                  "FLG1: unsupported version " + std::to_string(version));
  }
  const std::uint32_t kind = r.u32();
  ContainerObject obj;
  switch (static_cast<ContainerKind>(kind)) {
    case ContainerKind::SphereGrid: obj = decode_sphere_grid(r); break;
    case ContainerKind::SphereCoeffs: obj = decode_sphere_coeffs(r); break;
    case ContainerKind::BallGrid: obj = decode_ball_grid(r); break;
    case ContainerKind::FlagCoeffs: obj = decode_flag_coeffs(r); break;
    case ContainerKind::SphereKernels: obj = decode_sphere_kernels(r); break;
    case ContainerKind::FlagletKernels: obj = decode_flaglet_kernels(r); break;
    case ContainerKind::Decomposition: obj = decode_decomposition(r); break;
    default: throw IoError(IoErrc::UnknownKind, "FLG1: unknown kind " + std::to_string(kind));
  }
  try {
    std::visit([](const auto& value) { value.validate(); }, obj);
  } catch (const InvalidArgument& e) {
    throw IoError(IoErrc::InvalidHeader, std::string("FLG1: invalid object: ") + e.what());
  }
  return obj;
}

std::size_t write_container(const ContainerObject& obj, std::ostream& sink) {
  const auto bytes = encode_container(obj);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  sink.flush();
  if (!sink) {
    throw IoError(IoErrc::Io, "FLG1: failed to write " + std::to_string(bytes.size()) + " bytes");
  }
  return bytes.size();
}

ContainerObject read_container(std::istream& source) {
  std::vector<char> raw((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  if (source.bad()) throw IoError(IoErrc::Io, "FLG1: read failure");
  return decode_container(std::as_bytes(std::span<const char>(raw)));
}

std::size_t write_container_file(const ContainerObject& obj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrc::Io, "FLG1: cannot open " + path.string() + " for writing");
  try {
    return write_container(obj, out);
  } catch (const IoError& e) {
    if (e.code() != IoErrc::Io) throw;
    throw IoError(IoErrc::Io, std::string(e.what()) + " to " + path.string());
  }
}

ContainerObject read_container_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrc::Io, "FLG1: cannot open " + path.string() + " for reading");
  return read_container(in);
}

}  // namespace flag
