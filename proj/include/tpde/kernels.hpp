#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Inner loops of the dense gate engine. Each kernel has a portable scalar
// reference and an AVX2/FMA variant; `active()` picks one once per process
// based on CPUID (override with TPDE_ISA=scalar|avx2).
//
// Layout convention for the gate kernels: data is viewed as
// [outer][d][inner] with d = 2 or 4, and the d x d row-major matrix `m`
// acts on the middle axis in place.

namespace tpde::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  void (*apply4)(const cplx* m, cplx* data, std::size_t outer, std::size_t inner);
  void (*apply2)(const cplx* m, cplx* data, std::size_t outer, std::size_t inner);
  /// sum_i conj(a_i) b_i
  cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the binary was built without the AVX2 translation unit.
const KernelTable* avx2_table();

bool cpu_supports_avx2();
/// Table used by the library; resolved on first call.
const KernelTable& active();
std::string_view isa_name(Isa isa);

}  // namespace tpde::kernels
