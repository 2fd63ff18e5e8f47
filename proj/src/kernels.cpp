#include "deepstd/kernels.hpp"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deepstd::kernels {

namespace {

// Row-block worker for C += A * B. Four-row unrolling keeps the B row hot
// across independent accumulator streams; each C element is still updated
// in plain k order, so blocking does not change the numeric result.
void mm_nn_rows(Mat& C, const Mat& A, const Mat& B, int lo, int hi) {
  const int k = A.cols, n = B.cols;
  int i = lo;
  for (; i + 4 <= hi; i += 4) {
    const double *a0 = A.row(i), *a1 = A.row(i + 1), *a2 = A.row(i + 2), *a3 = A.row(i + 3);
    double *c0 = C.row(i), *c1 = C.row(i + 1), *c2 = C.row(i + 2), *c3 = C.row(i + 3);
    for (int kk = 0; kk < k; ++kk) {
      const double* b = B.row(kk);
      double v0 = a0[kk], v1 = a1[kk], v2 = a2[kk], v3 = a3[kk];
      for (int j = 0; j < n; ++j) {
        double bj = b[j];
        c0[j] += v0 * bj;
        c1[j] += v1 * bj;
        c2[j] += v2 * bj;
        c3[j] += v3 * bj;
      }
    }
  }
  for (; i < hi; ++i) {
    const double* a = A.row(i);
    double* c = C.row(i);
    for (int kk = 0; kk < k; ++kk) axpy(c, a[kk], B.row(kk), n);
  }
}

// Worker for C += A^T * B over a range of C rows (columns of A).
void mm_tn_rows(Mat& C, const Mat& A, const Mat& B, int lo, int hi) {
  const int m = A.rows, n = B.cols;
  int kk = lo;
  for (; kk + 2 <= hi; kk += 2) {
    double* c0 = C.row(kk);
    double* c1 = C.row(kk + 1);
    for (int i = 0; i < m; ++i) {
      const double* b = B.row(i);
      double v0 = A(i, kk), v1 = A(i, kk + 1);
      for (int j = 0; j < n; ++j) {
        double bj = b[j];
        c0[j] += v0 * bj;
        c1[j] += v1 * bj;
      }
    }
  }
  for (; kk < hi; ++kk) {
    double* c = C.row(kk);
    for (int i = 0; i < m; ++i) axpy(c, A(i, kk), B.row(i), n);
  }
}

void mm_nt_rows(Mat& C, const Mat& A, const Mat& B, int lo, int hi) {
  const int n = A.cols, k = B.rows;
  for (int i = lo; i < hi; ++i) {
    const double* a = A.row(i);
    double* c = C.row(i);
    for (int kk = 0; kk < k; ++kk) c[kk] += dot(a, B.row(kk), n);
  }
}

inline bool big_enough(size_t flops) { return flops >= (size_t{1} << 17); }

}  // namespace

void mm_nn_serial(Mat& C, const Mat& A, const Mat& B) {
  assert(A.cols == B.rows && C.rows == A.rows && C.cols == B.cols);
  mm_nn_rows(C, A, B, 0, A.rows);
}

void mm_nn(Mat& C, const Mat& A, const Mat& B) {
  assert(A.cols == B.rows && C.rows == A.rows && C.cols == B.cols);
  const size_t work = static_cast<size_t>(A.rows) * A.cols * B.cols;
  if (!big_enough(work) || C.rows < 8) {
    mm_nn_rows(C, A, B, 0, A.rows);
    return;
  }
#pragma omp parallel
  {
#ifdef _OPENMP
    int nt = omp_get_num_threads(), id = omp_get_thread_num();
#else
    int nt = 1, id = 0;
#endif
    int chunk = (C.rows + nt - 1) / nt;
    int lo = std::min(C.rows, id * chunk);
    int hi = std::min(C.rows, lo + chunk);
    if (lo < hi) mm_nn_rows(C, A, B, lo, hi);
  }
}

void mm_tn_serial(Mat& C, const Mat& A, const Mat& B) {
  assert(A.rows == B.rows && C.rows == A.cols && C.cols == B.cols);
  mm_tn_rows(C, A, B, 0, A.cols);
}

void mm_tn(Mat& C, const Mat& A, const Mat& B) {
  assert(A.rows == B.rows && C.rows == A.cols && C.cols == B.cols);
  const size_t work = static_cast<size_t>(A.rows) * A.cols * B.cols;
  if (!big_enough(work) || C.rows < 8) {
    mm_tn_rows(C, A, B, 0, A.cols);
    return;
  }
#pragma omp parallel
  {
#ifdef _OPENMP
    int nt = omp_get_num_threads(), id = omp_get_thread_num();
#else
    int nt = 1, id = 0;
#endif
    int chunk = (C.rows + nt - 1) / nt;
    int lo = std::min(C.rows, id * chunk);
    int hi = std::min(C.rows, lo + chunk);
    if (lo < hi) mm_tn_rows(C, A, B, lo, hi);
  }
}

void mm_nt_serial(Mat& C, const Mat& A, const Mat& B) {
  assert(A.cols == B.cols && C.rows == A.rows && C.cols == B.rows);
  mm_nt_rows(C, A, B, 0, A.rows);
}

void mm_nt(Mat& C, const Mat& A, const Mat& B) {
  assert(A.cols == B.cols && C.rows == A.rows && C.cols == B.rows);
  const size_t work = static_cast<size_t>(A.rows) * A.cols * B.rows;
  if (!big_enough(work) || C.rows < 8) {
    mm_nt_rows(C, A, B, 0, A.rows);
    return;
  }
#pragma omp parallel
  {
#ifdef _OPENMP
    int nt = omp_get_num_threads(), id = omp_get_thread_num();
#else
    int nt = 1, id = 0;
#endif
    int chunk = (C.rows + nt - 1) / nt;
    int lo = std::min(C.rows, id * chunk);
    int hi = std::min(C.rows, lo + chunk);
    if (lo < hi) mm_nt_rows(C, A, B, lo, hi);
  }
}

void col_sum(double* out, const Mat& A) {
  for (int i = 0; i < A.rows; ++i) axpy(out, 1.0, A.row(i), A.cols);
}

double dot(const double* x, const double* y, int n) {
  double s[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  int j = 0;
  for (; j + 8 <= n; j += 8)
    for (int l = 0; l < 8; ++l) s[l] += x[j + l] * y[j + l];
  double tail = 0.0;
  for (; j < n; ++j) tail += x[j] * y[j];
  return ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7])) + tail;
}

void sigmoid_inplace(double* x, int n) {
  for (int j = 0; j < n; ++j) x[j] = sigmoid(x[j]);
}

void tanh_inplace(double* x, int n) {
  for (int j = 0; j < n; ++j) x[j] = fast_tanh(x[j]);
}

}  // namespace deepstd::kernels
