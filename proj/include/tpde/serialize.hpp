#pragma once

#include <iosfwd>
#include <string>

#include "tpde/mpo.hpp"
#include "tpde/mps.hpp"

// Binary container for MPS/MPO, all integers and doubles little-endian:
//   magic "TPDETN01", u32 kind (1 = MPS, 2 = MPO), u64 site count,
//   f64 truncation error, then per site: u32 rank, u64 extents[rank],
//   and the row-major entries as (re, im) f64 pairs.

namespace tpde {

void write_mps(std::ostream& os, const Mps& s);
Mps read_mps(std::istream& is);
void write_mpo(std::ostream& os, const Mpo& o);
Mpo read_mpo(std::istream& is);

void save_mps(const std::string& path, const Mps& s);
Mps load_mps(const std::string& path);
void save_mpo(const std::string& path, const Mpo& o);
Mpo load_mpo(const std::string& path);

}  // namespace tpde
