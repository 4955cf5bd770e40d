// SPDX-License-Identifier: MIT
#include "convint/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace convint::io {

namespace {

constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated field file");
  return v;
}

}  // namespace

void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.write("CINS", 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.n()));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(f.rank()));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(f.ncomp()));
  const auto vals = f.to_physical();
  os.write(reinterpret_cast<const char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double)));
}

Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CINS", 4) != 0) throw std::runtime_error("not a field dump: " + path);
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("unsupported field dump version");
  const int n = static_cast<int>(get<std::uint32_t>(is));
  const auto rank = static_cast<Rank>(get<std::uint8_t>(is));
  const int nc = get<std::uint8_t>(is);
  if (static_cast<std::uint8_t>(rank) > 3 || nc != components(rank)) throw std::runtime_error("bad rank in field dump");
  PeriodicGrid g(n);
  std::vector<double> vals(g.phys_size() * nc);
  is.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field file");
  return Field::from_physical(g, rank, vals);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void write_pgm(const std::string& path, const Field& f, int component) {
  const auto vals = f.component_physical(component);
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  const double span = *hi - *lo > 0 ? *hi - *lo : 1.0;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "P5\n" << f.n() << ' ' << f.n() << "\n255\n";
  for (double v : vals) os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (v - *lo) / span))));
}

}  // namespace convint::io
