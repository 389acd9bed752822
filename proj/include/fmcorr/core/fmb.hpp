#pragma once

#include "fmcorr/common.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fmcorr {

// FMB matrix container: 8-byte magic "FMBMAT01", little-endian u64 rows and
// cols, then rows*cols little-endian f64, row-major.
inline constexpr char kFmbMagic[8] = {'F', 'M', 'B', 'M', 'A', 'T', '0', '1'};

namespace detail {

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffULL);
    return r;
  }
  return v;
}

}  // namespace detail

inline void write_fmb(std::ostream& out, const Matrix& m) {
  out.write(kFmbMagic, 8);
  const std::uint64_t dims[2] = {detail::to_le(static_cast<std::uint64_t>(m.rows())),
                                 detail::to_le(static_cast<std::uint64_t>(m.cols()))};
  out.write(reinterpret_cast<const char*>(dims), 16);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::uint64_t bits;
      const double v = m(i, j);
      std::memcpy(&bits, &v, 8);
      bits = detail::to_le(bits);
      out.write(reinterpret_cast<const char*>(&bits), 8);
    }
  }
  if (!out) throw io_error("FMB write failed");
}

inline Matrix read_fmb(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kFmbMagic, 8) != 0)
    throw io_error("not an FMB matrix (bad magic)");
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), 16);
  if (!in) throw io_error("FMB header truncated");
  const std::uint64_t rows = detail::to_le(dims[0]);
  const std::uint64_t cols = detail::to_le(dims[1]);
  if (rows > (1ULL << 32) || cols > (1ULL << 32))
    throw io_error("FMB dimensions out of range");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      std::uint64_t bits;
      in.read(reinterpret_cast<char*>(&bits), 8);
      if (!in) throw io_error("FMB payload truncated");
      bits = detail::to_le(bits);
      double v;
      std::memcpy(&v, &bits, 8);
      m(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  }
  return m;
}

inline void write_fmb_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  write_fmb(out, m);
}

inline Matrix read_fmb_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  try {
    return read_fmb(in);
  } catch (const io_error& e) {
    throw io_error(std::string(e.what()) + " in '" + path + "'");
  }
}

}  // namespace fmcorr
