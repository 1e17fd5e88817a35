#include "tpde/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "tpde/errors.hpp"

namespace tpde {

namespace {

constexpr char kMagic[8] = {'T', 'P', 'D', 'E', 'T', 'N', '0', '1'};
constexpr std::uint32_t kMps = 1;
constexpr std::uint32_t kMpo = 2;

static_assert(std::endian::native == std::endian::little,
              "the container writer assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ValidationError("tensor container: unexpected end of data");
  }
  return v;
}

void write_sites(std::ostream& os, std::uint32_t kind, const std::vector<Tensor>& sites,
                 double error) {
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kind);
  put<std::uint64_t>(os, sites.size());
  put<double>(os, error);
  for (const auto& t : sites) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(t.rank()));
    for (Index e : t.shape()) put<std::uint64_t>(os, e);
    for (const cplx& x : t.data()) {
      put<double>(os, x.real());
      put<double>(os, x.imag());
    }
  }
  if (!os) throw Error("tensor container: write failed");
}

std::vector<Tensor> read_sites(std::istream& is, std::uint32_t kind, double& error) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ValidationError("tensor container: bad magic");
  }
  if (get<std::uint32_t>(is) != kind) throw ValidationError("tensor container: wrong kind");
  const auto n = get<std::uint64_t>(is);
  error = get<double>(is);
  std::vector<Tensor> sites;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto rank = get<std::uint32_t>(is);
    if (rank > 8) throw ValidationError("tensor container: implausible rank");
    Shape shape(rank);
    for (auto& e : shape) e = get<std::uint64_t>(is);
    std::vector<cplx> data(shape_product(shape));
    for (auto& x : data) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      x = cplx(re, im);
    }
    sites.emplace_back(std::move(shape), std::move(data));
  }
  return sites;
}

}  // namespace

void write_mps(std::ostream& os, const Mps& s) { write_sites(os, kMps, s.sites, s.truncation_error); }

Mps read_mps(std::istream& is) {
  Mps s;
  s.sites = read_sites(is, kMps, s.truncation_error);
  s.validate();
  return s;
}

void write_mpo(std::ostream& os, const Mpo& o) { write_sites(os, kMpo, o.sites, o.truncation_error); }

Mpo read_mpo(std::istream& is) {
  Mpo o;
  o.sites = read_sites(is, kMpo, o.truncation_error);
  o.validate();
  return o;
}

void save_mps(const std::string& path, const Mps& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_mps(os, s);
}

Mps load_mps(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_mps(is);
}

void save_mpo(const std::string& path, const Mpo& o) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_mpo(os, o);
}

Mpo load_mpo(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_mpo(is);
}

}  // namespace tpde
