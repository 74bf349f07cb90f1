#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "qconn/errors.hpp"
#include "qconn/lattice.hpp"
#include "qconn/qconnection.hpp"

namespace qconn {

/// QCON1 kernel file: magic "QCON1", version u16, d u16, N u16, n as three
/// u32 (padded axes 1), hbar f64, then row-major site-pair blocks of N x N
/// complex128, real then imaginary, little-endian throughout. Round-trips
/// bit-exactly.
namespace kernel_io {

inline constexpr char kMagic[5] = {'Q', 'C', 'O', 'N', '1'};
inline constexpr std::uint16_t kVersion = 1;

namespace detail {

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw format_error("kernel file: truncated header");
  return value;
}

}  // namespace detail

inline void save(const std::string& path, const QConnectionKernel& k) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("kernel file: cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  detail::put<std::uint16_t>(out, kVersion);
  detail::put<std::uint16_t>(out, static_cast<std::uint16_t>(k.shape().dim));
  detail::put<std::uint16_t>(out, static_cast<std::uint16_t>(k.group_dim()));
  for (int j = 0; j < 3; ++j)
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(k.shape().n[j]));
  detail::put<double>(out, k.hbar());
  for (const MatrixXcd& m : k.table())
    for (int r = 0; r < k.group_dim(); ++r)
      for (int c = 0; c < k.group_dim(); ++c) {
        detail::put<double>(out, m(r, c).real());
        detail::put<double>(out, m(r, c).imag());
      }
  if (!out) throw std::runtime_error("kernel file: write failed: " + path);
}

/// Loads a kernel and validates it against the manifold it will act on.
/// Version or magic mismatch and truncated payloads are format errors; a
/// lattice/group mismatch is an argument error.
inline QConnectionKernel load(const std::string& path, const LatticeManifold& man,
                              const GroupSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("kernel file: cannot open for reading: " + path);
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw format_error("kernel file: bad magic");
  std::uint16_t version = detail::get<std::uint16_t>(in);
  if (version != kVersion)
    throw format_error("kernel file: unsupported version " + std::to_string(version));
  int d = detail::get<std::uint16_t>(in);
  int n_group = detail::get<std::uint16_t>(in);
  std::array<int, 3> n;
  for (int j = 0; j < 3; ++j) n[j] = static_cast<int>(detail::get<std::uint32_t>(in));
  double hbar = detail::get<double>(in);
  if (d != man.dim() || n != man.shape().n)
    throw std::invalid_argument("kernel file: lattice mismatch with configured manifold");
  if (n_group != spec.dim)
    throw std::invalid_argument("kernel file: group dimension mismatch");

  std::size_t sites = static_cast<std::size_t>(man.site_count());
  QConnectionKernel k(man.shape(), n_group, hbar, 0);
  for (std::size_t p = 0; p < sites * sites; ++p) {
    MatrixXcd m(n_group, n_group);
    for (int r = 0; r < n_group; ++r)
      for (int c = 0; c < n_group; ++c) {
        double re, im;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        in.read(reinterpret_cast<char*>(&im), sizeof(double));
        if (!in) throw format_error("kernel file: truncated payload");
        m(r, c) = cplx(re, im);
      }
    k.table()[p] = std::move(m);
  }
  in.peek();
  if (!in.eof()) throw format_error("kernel file: trailing bytes after payload");
  return k;
}

}  // namespace kernel_io
}  // namespace qconn
