#pragma once

// FLG1 container format. All integers are u32 and all reals IEEE-754
// binary64, both little-endian. Complex values are stored as (re, im).
//
//   0  "FLG1"
//   4  version (1)
//   8  kind
//  12  kind header, then payload
//
// kind 1 SphereGrid      L                          | L(2L-1) complex
// kind 2 SphereCoeffs    L                          | L^2 complex
// kind 3 BallGrid        L, P, tau                  | P L(2L-1) complex
// kind 4 FlagCoeffs      L, P, tau                  | P L^2 complex
// kind 5 SphereKernels   L, lambda, j0, J           | eta[L], kappa_j[L] for j = j0..J
// kind 6 FlagletKernels  L, P, lambda, nu, j0_ang, j0_rad, J_ang, J_rad
//                                                   | phi[L P], psi[L P] per scale slot
// kind 7 Decomposition   domain (1 sphere, 2 ball), L, P, tau, lambda, nu,
//                        j0_ang, j0_rad, J_ang, J_rad, flags (bit 0: multires),
//                        part count, then (L_part, P_part) per part
//                                                   | every part grid, scaling first
//
// Sphere decompositions use P = 1, tau = 1, nu = 0, j0_rad = J_rad = 0.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "flag/flag_transform.hpp"
#include "flag/flaglet_transform.hpp"
#include "flag/kernel_tiling.hpp"
#include "flag/sphere_harmonics.hpp"
#include "flag/sphere_wavelets.hpp"

namespace flag {

inline constexpr std::uint32_t kContainerVersion = 1;

enum class ContainerKind : std::uint32_t {
  SphereGrid = 1,
  SphereCoeffs = 2,
  BallGrid = 3,
  FlagCoeffs = 4,
  SphereKernels = 5,
  FlagletKernels = 6,
  Decomposition = 7,
};

enum class IoErrc {
  Io,
  MagicMismatch,
  UnsupportedVersion,
  UnknownKind,
  Truncated,
  LengthMismatch,
  InvalidHeader,
  KindMismatch,
};

class IoError : public std::runtime_error {
 public:
  IoError(IoErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  IoErrc code() const noexcept { return code_; }

 private:
  IoErrc code_;
};

using ContainerObject =
    std::variant<SphereGrid, SphereCoeffs, BallGrid, FlagCoeffs, SphereKernels, FlagletKernels,
                 SphereDecomposition, FlagletDecomposition>;

ContainerKind kind_of(const ContainerObject& obj);
const char* kind_name(ContainerKind kind);

std::vector<std::byte> encode_container(const ContainerObject& obj);
ContainerObject decode_container(std::span<const std::byte> bytes);

/// Writes the encoded object and returns the number of bytes written.
std::size_t write_container(const ContainerObject& obj, std::ostream& sink);
ContainerObject read_container(std::istream& source);

std::size_t write_container_file(const ContainerObject& obj, const std::filesystem::path& path);
ContainerObject read_container_file(const std::filesystem::path& path);

/// Extracts a specific alternative or throws IoErrc::KindMismatch.
template <typename T>
T expect_kind(ContainerObject obj, const std::string& context) {
  if (auto* v = std::get_if<T>(&obj)) return std::move(*v);
  throw IoError(IoErrc::KindMismatch,
                context + ": unexpected container kind " + kind_name(kind_of(obj)));
}

}  // namespace flag
