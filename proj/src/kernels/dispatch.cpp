#include <cstdlib>
#include <string>

#include "tpde/kernels.hpp"

namespace tpde::kernels {

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable& resolve() {
  const char* env = std::getenv("TPDE_ISA");
  const std::string want = env ? env : "";
  if (want == "scalar") return scalar_table();
  if (cpu_supports_avx2() && avx2_table() != nullptr) return *avx2_table();
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = resolve();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace tpde::kernels
