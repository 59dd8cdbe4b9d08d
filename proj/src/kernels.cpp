#include "ftreg/kernels.hpp"

namespace ftreg::kernels {

namespace ref {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

}  // namespace ref

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using ScaleFn = void (*)(double, double*, std::size_t);

struct Dispatch {
  DotFn dot = &ref::dot;
  AxpyFn axpy = &ref::axpy;
  ScaleFn scale = &ref::scale;
  const char* isa = "scalar";
};

Dispatch pick_dispatch() {
  Dispatch d;
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  if (avx2::compiled_in() && __builtin_cpu_supports("avx2") &&
      __builtin_cpu_supports("fma")) {
    d.dot = &avx2::dot;
    d.axpy = &avx2::axpy;
    d.scale = &avx2::scale;
    d.isa = "avx2";
  }
#elif defined(__aarch64__)
  d.dot = &neon::dot;
  d.axpy = &neon::axpy;
  d.scale = &neon::scale;
  d.isa = "neon";
#endif
  return d;
}

const Dispatch& dispatch() {
  static const Dispatch d = pick_dispatch();
  return d;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  dispatch().axpy(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  dispatch().scale(alpha, x, n);
}

const char* active_isa() { return dispatch().isa; }

}  // namespace ftreg::kernels
