#include "tpde/kernels.hpp"

namespace tpde::kernels {
namespace {

void apply4_scalar(const cplx* m, cplx* data, std::size_t outer, std::size_t inner) {
  const std::size_t block = 4 * inner;
  for (std::size_t o = 0; o < outer; ++o) {
    cplx* base = data + o * block;
    for (std::size_t i = 0; i < inner; ++i) {
      const cplx x0 = base[i];
      const cplx x1 = base[inner + i];
      const cplx x2 = base[2 * inner + i];
      const cplx x3 = base[3 * inner + i];
      for (std::size_t a = 0; a < 4; ++a) {
        const cplx* row = m + 4 * a;
        base[a * inner + i] = row[0] * x0 + row[1] * x1 + row[2] * x2 + row[3] * x3;
      }
    }
  }
}

void apply2_scalar(const cplx* m, cplx* data, std::size_t outer, std::size_t inner) {
  const std::size_t block = 2 * inner;
  for (std::size_t o = 0; o < outer; ++o) {
    cplx* base = data + o * block;
    for (std::size_t i = 0; i < inner; ++i) {
      const cplx x0 = base[i];
      const cplx x1 = base[inner + i];
      base[i] = m[0] * x0 + m[1] * x1;
      base[inner + i] = m[2] * x0 + m[3] * x1;
    }
  }
}

cplx dotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, apply4_scalar, apply2_scalar, dotc_scalar};
  return table;
}

}  // namespace tpde::kernels
