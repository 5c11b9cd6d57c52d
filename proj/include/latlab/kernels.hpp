#pragma once

#include <cstddef>

// Vector primitives used by the conjugate-gradient solvers and the discrete
// norms. A scalar reference implementation is always available; on x86 an
// AVX2+FMA variant (on aarch64 a NEON variant) is selected at runtime.
namespace latlab::kernels {

enum class Backend { scalar, avx2, neon };

// Backend currently used by the dispatching entry points.
Backend active_backend();
const char* backend_name(Backend b);

// Force a specific backend (tests use this to check scalar/SIMD equivalence).
// Requesting an unsupported backend falls back to scalar.
void set_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double norm2_squared(const double* a, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = x + beta * y   (CG direction update)
void xpby(const double* x, double beta, double* y, std::size_t n);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double norm2_squared_scalar(const double* a, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void xpby_scalar(const double* x, double beta, double* y, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
double norm2_squared_avx2(const double* a, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void xpby_avx2(const double* x, double beta, double* y, std::size_t n);
#endif
#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
double norm2_squared_neon(const double* a, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
void xpby_neon(const double* x, double beta, double* y, std::size_t n);
#endif
}  // namespace detail

}  // namespace latlab::kernels
