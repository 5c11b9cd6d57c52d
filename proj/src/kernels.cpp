#include "latlab/kernels.hpp"

namespace latlab::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double norm2_squared_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

}  // namespace detail

namespace {

Backend detect_backend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Backend::avx2;
#endif
#if defined(__aarch64__)
  return Backend::neon;
#endif
  return Backend::scalar;
}

Backend g_backend = detect_backend();

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

}  // namespace

Backend active_backend() { return g_backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

void set_backend(Backend b) { g_backend = supported(b) ? b : Backend::scalar; }

double dot(const double* a, const double* b, std::size_t n) {
  switch (g_backend) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2: return detail::dot_avx2(a, b, n);
#endif
#if defined(__aarch64__)
    case Backend::neon: return detail::dot_neon(a, b, n);
#endif
    default: return detail::dot_scalar(a, b, n);
  }
}

double norm2_squared(const double* a, std::size_t n) {
  switch (g_backend) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2: return detail::norm2_squared_avx2(a, n);
#endif
#if defined(__aarch64__)
    case Backend::neon: return detail::norm2_squared_neon(a, n);
#endif
    default: return detail::norm2_squared_scalar(a, n);
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  switch (g_backend) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2: detail::axpy_avx2(alpha, x, y, n); return;
#endif
#if defined(__aarch64__)
    case Backend::neon: detail::axpy_neon(alpha, x, y, n); return;
#endif
    default: detail::axpy_scalar(alpha, x, y, n);
  }
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  switch (g_backend) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2: detail::xpby_avx2(x, beta, y, n); return;
#endif
#if defined(__aarch64__)
    case Backend::neon: detail::xpby_neon(x, beta, y, n); return;
#endif
    default: detail::xpby_scalar(x, beta, y, n);
  }
}

}  // namespace latlab::kernels
