#pragma once

#include <cstdint>

namespace ts {

// Row-major matrix kernels used by the dense layer and the im2col
// convolution path. The i-k-j loop order keeps the inner loop contiguous in
// both B and C so the compiler can vectorize it. Accumulation order is fixed,
// which keeps results bit-stable run to run.

// C[M,N] += A[M,K] * B[K,N]
template <typename T>
void gemm_acc(int64_t m, int64_t k, int64_t n, const T* a, const T* b, T* c) {
    for (int64_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        T* crow = c + i * n;
        for (int64_t p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* brow = b + p * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[M,N] += A[K,M]^T * B[K,N]
template <typename T>
void gemm_at_b_acc(int64_t m, int64_t k, int64_t n, const T* a, const T* b, T* c) {
    for (int64_t p = 0; p < k; ++p) {
        const T* arow = a + p * m;
        const T* brow = b + p * n;
        for (int64_t i = 0; i < m; ++i) {
            const T av = arow[i];
            T* crow = c + i * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[M,N] += A[M,K] * B[N,K]^T
template <typename T>
void gemm_a_bt_acc(int64_t m, int64_t k, int64_t n, const T* a, const T* b, T* c) {
    for (int64_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        T* crow = c + i * n;
        for (int64_t j = 0; j < n; ++j) {
            const T* brow = b + j * k;
            T acc = T(0);
            for (int64_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] += acc;
        }
    }
}

}  // namespace ts
