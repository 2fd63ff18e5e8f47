#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "deepstd/mat.hpp"

// Dense math kernels. Every kernel comes in two flavours: a plain serial
// reference (suffix _serial) and the default OpenMP-parallel version used
// by the rest of the code. Both compute each output element with the same
// accumulation order, so their results are bit-identical for any thread
// count; the unit tests assert this and the bench tool compares throughput.

namespace deepstd::kernels {

// C[m x n] += A[m x k] * B[k x n]
void mm_nn(Mat& C, const Mat& A, const Mat& B);
void mm_nn_serial(Mat& C, const Mat& A, const Mat& B);

// C[k x n] += A^T * B with A[m x k], B[m x n]
void mm_tn(Mat& C, const Mat& A, const Mat& B);
void mm_tn_serial(Mat& C, const Mat& A, const Mat& B);

// C[m x k] += A * B^T with A[m x n], B[k x n]
void mm_nt(Mat& C, const Mat& A, const Mat& B);
void mm_nt_serial(Mat& C, const Mat& A, const Mat& B);

// out[j] += sum_i A[i][j]
void col_sum(double* out, const Mat& A);

// y[0..n) += a * x[0..n)
inline void axpy(double* y, double a, const double* x, int n) {
  for (int j = 0; j < n; ++j) y[j] += a * x[j];
}

// Deterministic dot product: eight fixed partial-sum lanes combined in a
// fixed order, independent of vectorization choices.
double dot(const double* x, const double* y, int n);

// --- elementwise transcendentals -----------------------------------------
// Branch-free Cephes-style rational approximation of exp, accurate to a few
// ulp over the clamped range. Written so the compiler can vectorize loops
// over it; libm's scalar exp would dominate the LSTM gate cost otherwise.
inline double fast_exp(double x) {
  x = std::min(709.0, std::max(-708.0, x));
  double n = std::nearbyint(x * 1.4426950408889634074);
  double r = x - n * 6.93145751953125e-1 - n * 1.42860682030941723212e-6;
  double rr = r * r;
  double p = r * (((1.26177193074810590878e-4 * rr + 3.02994407707441961300e-2) * rr +
                   9.99999999999999999910e-1));
  double q = ((3.00198505138664455042e-6 * rr + 2.52448340349684104192e-3) * rr +
              2.27265548208155028766e-1) *
                 rr +
             2.00000000000000000005e0;
  double y = 1.0 + 2.0 * p / (q - p);
  // scale by 2^n via exponent bits; |n| <= 1023 after the clamp above
  uint64_t bits = static_cast<uint64_t>(static_cast<int64_t>(n) + 1023) << 52;
  return y * std::bit_cast<double>(bits);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + fast_exp(-x)); }

inline double fast_tanh(double x) {
  double e = fast_exp(-2.0 * x);
  return (1.0 - e) / (1.0 + e);
}

void sigmoid_inplace(double* x, int n);
void tanh_inplace(double* x, int n);

}  // namespace deepstd::kernels
