// Built with -mavx2 -mfma. Keep this file free of inline library templates so
// no AVX2-encoded copy of a shared inline function can leak into other units.
#include <immintrin.h>

#include "tpde/kernels.hpp"

namespace tpde::kernels {
namespace {

// (x * m) for a vector of two complex numbers x and a broadcast coefficient
// split into real/imag broadcasts is accumulated as P += x*re, Q += swap(x)*im;
// the product is addsub(P, Q).

void apply4_avx2(const cplx* mc, cplx* datac, std::size_t outer, std::size_t inner) {
  const double* m = reinterpret_cast<const double*>(mc);
  double* data = reinterpret_cast<double*>(datac);
  const std::size_t block = 8 * inner;  // doubles per [4][inner] block

  if (inner >= 2) {
    __m256d mre[16], mim[16];
    for (int k = 0; k < 16; ++k) {
      mre[k] = _mm256_set1_pd(m[2 * k]);
      mim[k] = _mm256_set1_pd(m[2 * k + 1]);
    }
    const std::size_t stride = 2 * inner;
    const std::size_t paired = inner & ~std::size_t{1};
    for (std::size_t o = 0; o < outer; ++o) {
      double* base = data + o * block;
      for (std::size_t i = 0; i < paired; i += 2) {
        double* p = base + 2 * i;
        const __m256d x0 = _mm256_loadu_pd(p);
        const __m256d x1 = _mm256_loadu_pd(p + stride);
        const __m256d x2 = _mm256_loadu_pd(p + 2 * stride);
        const __m256d x3 = _mm256_loadu_pd(p + 3 * stride);
        const __m256d s0 = _mm256_permute_pd(x0, 0x5);
        const __m256d s1 = _mm256_permute_pd(x1, 0x5);
        const __m256d s2 = _mm256_permute_pd(x2, 0x5);
        const __m256d s3 = _mm256_permute_pd(x3, 0x5);
        for (int a = 0; a < 4; ++a) {
          const int r = 4 * a;
          __m256d acc = _mm256_mul_pd(x0, mre[r]);
          __m256d acs = _mm256_mul_pd(s0, mim[r]);
          acc = _mm256_fmadd_pd(x1, mre[r + 1], acc);
          acs = _mm256_fmadd_pd(s1, mim[r + 1], acs);
          acc = _mm256_fmadd_pd(x2, mre[r + 2], acc);
          acs = _mm256_fmadd_pd(s2, mim[r + 2], acs);
          acc = _mm256_fmadd_pd(x3, mre[r + 3], acc);
          acs = _mm256_fmadd_pd(s3, mim[r + 3], acs);
          _mm256_storeu_pd(p + a * stride, _mm256_addsub_pd(acc, acs));
        }
      }
      for (std::size_t i = paired; i < inner; ++i) {
        double* p = base + 2 * i;
        double xr[4], xi[4];
        for (int b = 0; b < 4; ++b) {
          xr[b] = p[b * stride];
          xi[b] = p[b * stride + 1];
        }
        for (int a = 0; a < 4; ++a) {
          double yr = 0.0, yi = 0.0;
          for (int b = 0; b < 4; ++b) {
            const double cr = m[2 * (4 * a + b)], ci = m[2 * (4 * a + b) + 1];
            yr += cr * xr[b] - ci * xi[b];
            yi += cr * xi[b] + ci * xr[b];
          }
          p[a * stride] = yr;
          p[a * stride + 1] = yi;
        }
      }
    }
    return;
  }

  // inner == 1: the four inputs are contiguous; vectorize over output pairs.
  __m256d cre[8], cim[8];  // [pair][b]
  for (int pair = 0; pair < 2; ++pair) {
    for (int b = 0; b < 4; ++b) {
      const int lo = 4 * (2 * pair) + b, hi = 4 * (2 * pair + 1) + b;
      cre[4 * pair + b] = _mm256_setr_pd(m[2 * lo], m[2 * lo], m[2 * hi], m[2 * hi]);
      cim[4 * pair + b] =
          _mm256_setr_pd(m[2 * lo + 1], m[2 * lo + 1], m[2 * hi + 1], m[2 * hi + 1]);
    }
  }
  for (std::size_t o = 0; o < outer; ++o) {
    double* p = data + o * 8;
    __m256d xb[4], xs[4];
    for (int b = 0; b < 4; ++b) {
      xb[b] = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(p + 2 * b));
      xs[b] = _mm256_permute_pd(xb[b], 0x5);
    }
    for (int pair = 0; pair < 2; ++pair) {
      __m256d acc = _mm256_mul_pd(xb[0], cre[4 * pair]);
      __m256d acs = _mm256_mul_pd(xs[0], cim[4 * pair]);
      for (int b = 1; b < 4; ++b) {
        acc = _mm256_fmadd_pd(xb[b], cre[4 * pair + b], acc);
        acs = _mm256_fmadd_pd(xs[b], cim[4 * pair + b], acs);
      }
      _mm256_storeu_pd(p + 4 * pair, _mm256_addsub_pd(acc, acs));
    }
  }
}

void apply2_avx2(const cplx* mc, cplx* datac, std::size_t outer, std::size_t inner) {
  const double* m = reinterpret_cast<const double*>(mc);
  double* data = reinterpret_cast<double*>(datac);
  const std::size_t stride = 2 * inner;
  if (inner >= 2) {
    __m256d mre[4], mim[4];
    for (int k = 0; k < 4; ++k) {
      mre[k] = _mm256_set1_pd(m[2 * k]);
      mim[k] = _mm256_set1_pd(m[2 * k + 1]);
    }
    const std::size_t paired = inner & ~std::size_t{1};
    for (std::size_t o = 0; o < outer; ++o) {
      double* base = data + o * 2 * stride;
      for (std::size_t i = 0; i < paired; i += 2) {
        double* p = base + 2 * i;
        const __m256d x0 = _mm256_loadu_pd(p);
        const __m256d x1 = _mm256_loadu_pd(p + stride);
        const __m256d s0 = _mm256_permute_pd(x0, 0x5);
        const __m256d s1 = _mm256_permute_pd(x1, 0x5);
        __m256d a0 = _mm256_fmadd_pd(x1, mre[1], _mm256_mul_pd(x0, mre[0]));
        __m256d b0 = _mm256_fmadd_pd(s1, mim[1], _mm256_mul_pd(s0, mim[0]));
        __m256d a1 = _mm256_fmadd_pd(x1, mre[3], _mm256_mul_pd(x0, mre[2]));
        __m256d b1 = _mm256_fmadd_pd(s1, mim[3], _mm256_mul_pd(s0, mim[2]));
        _mm256_storeu_pd(p, _mm256_addsub_pd(a0, b0));
        _mm256_storeu_pd(p + stride, _mm256_addsub_pd(a1, b1));
      }
      for (std::size_t i = paired; i < inner; ++i) {
        double* p = base + 2 * i;
        const double x0r = p[0], x0i = p[1], x1r = p[stride], x1i = p[stride + 1];
        p[0] = m[0] * x0r - m[1] * x0i + m[2] * x1r - m[3] * x1i;
        p[1] = m[0] * x0i + m[1] * x0r + m[2] * x1i + m[3] * x1r;
        p[stride] = m[4] * x0r - m[5] * x0i + m[6] * x1r - m[7] * x1i;
        p[stride + 1] = m[4] * x0i + m[5] * x0r + m[6] * x1i + m[7] * x1r;
      }
    }
    return;
  }
  const __m256d cre0 = _mm256_setr_pd(m[0], m[0], m[4], m[4]);
  const __m256d cim0 = _mm256_setr_pd(m[1], m[1], m[5], m[5]);
  const __m256d cre1 = _mm256_setr_pd(m[2], m[2], m[6], m[6]);
  const __m256d cim1 = _mm256_setr_pd(m[3], m[3], m[7], m[7]);
  for (std::size_t o = 0; o < outer; ++o) {
    double* p = data + o * 4;
    const __m256d x0 = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(p));
    const __m256d x1 = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(p + 2));
    const __m256d acc = _mm256_fmadd_pd(x1, cre1, _mm256_mul_pd(x0, cre0));
    const __m256d acs = _mm256_fmadd_pd(_mm256_permute_pd(x1, 0x5), cim1,
                                        _mm256_mul_pd(_mm256_permute_pd(x0, 0x5), cim0));
    _mm256_storeu_pd(p, _mm256_addsub_pd(acc, acs));
  }
}

cplx dotc_avx2(const cplx* ac, const cplx* bc, std::size_t n) {
  const double* a = reinterpret_cast<const double*>(ac);
  const double* b = reinterpret_cast<const double*>(bc);
  __m256d re = _mm256_setzero_pd();
  __m256d im = _mm256_setzero_pd();
  const std::size_t paired = n & ~std::size_t{1};
  for (std::size_t i = 0; i < paired; i += 2) {
    const __m256d x = _mm256_loadu_pd(a + 2 * i);
    const __m256d y = _mm256_loadu_pd(b + 2 * i);
    re = _mm256_fmadd_pd(x, y, re);
    im = _mm256_fmadd_pd(x, _mm256_permute_pd(y, 0x5), im);
  }
  alignas(32) double r[4], s[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(s, im);
  double out_re = r[0] + r[1] + r[2] + r[3];
  double out_im = s[0] - s[1] + s[2] - s[3];
  for (std::size_t i = paired; i < n; ++i) {
    out_re += a[2 * i] * b[2 * i] + a[2 * i + 1] * b[2 * i + 1];
    out_im += a[2 * i] * b[2 * i + 1] - a[2 * i + 1] * b[2 * i];
  }
  return {out_re, out_im};
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::avx2, apply4_avx2, apply2_avx2, dotc_avx2};
  return &table;
}

}  // namespace tpde::kernels
