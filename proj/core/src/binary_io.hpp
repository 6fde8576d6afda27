#pragma once

// Little-endian primitives shared by the dataset and checkpoint containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "motiondrift/errors.hpp"

namespace motiondrift::detail {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

template <class T>
void write_raw(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T read_raw(std::istream& in, const char* what) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw DataError(std::string("truncated file while reading ") + what);
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in, const char* what, std::uint32_t max_len = 1u << 20) {
  const auto n = read_raw<std::uint32_t>(in, what);
  if (n > max_len) throw DataError(std::string("implausible length for ") + what);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw DataError(std::string("truncated file while reading ") + what);
  return s;
}

inline void expect_magic(std::istream& in, const std::string& magic, const std::string& source) {
  std::string got(magic.size(), '\0');
  if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic) {
    throw DataError(source + ": bad magic, expected " + magic);
  }
}

}  // namespace motiondrift::detail
