#pragma once

#include <cstddef>

// Flat-array arithmetic kernels used by the tensor inner loops.
// Scalar reference implementations live in kernels::ref; vectorized
// variants (AVX2 on x86-64, NEON on aarch64) are compiled in separate
// translation units and selected once at startup based on the CPU.
// The dispatched entry points below are what library code calls.

namespace ftreg::kernels {

namespace ref {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace ref

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
bool compiled_in();
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace neon
#endif

// Runtime-dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// x *= alpha
void scale(double alpha, double* x, std::size_t n);

// Name of the instruction set the dispatcher picked: "avx2", "neon" or "scalar".
const char* active_isa();

}  // namespace ftreg::kernels
