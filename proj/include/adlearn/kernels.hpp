#pragma once

// Inner loops that sweep the learning recursion for many candidate gains at
// once. Each has a scalar reference and an AVX2 variant; the variants perform
// the same floating-point operations in the same order per lane, so results
// agree bit for bit. The active variant is chosen at runtime and can be forced
// to the scalar path with ADLEARN_SIMD=scalar.

#include <cstddef>
#include <span>

namespace adlearn::kernels {

enum class Isa { scalar, avx2 };

// Best variant supported by the running CPU and compiled into the library.
Isa detected_isa();
// detected_isa() unless the ADLEARN_SIMD environment variable says "scalar".
Isa active_isa();
const char* isa_name(Isa isa);

// out[k] = sum_t (z_t - a_{t-1}(thetas[k]))^2 with a_0 = a_start and
// a_t = a_{t-1} + (theta/t)(y_t - a_{t-1}).
void nls_objective(std::span<const double> thetas, double a_start, std::span<const double> y,
                   std::span<const double> z, std::span<double> out, Isa isa = active_isa());

// Single-gain version; identical to nls_objective for one lane.
double nls_objective_one(double theta, double a_start, std::span<const double> y, std::span<const double> z);

// Moments of the profiled joint objective. With y*_t = y_t - alpha and
// a*_0 = 0, a*_t = a*_{t-1} + (theta/t)(y*_t - a*_{t-1}):
//   sxy[k] = sum_t y*_t a*_{t-1}(thetas[k]),  sxx[k] = sum_t a*_{t-1}(thetas[k])^2.
void profile_moments(std::span<const double> thetas, double alpha, std::span<const double> y,
                     std::span<double> sxy, std::span<double> sxx, Isa isa = active_isa());

namespace detail {
void nls_objective_scalar(const double* thetas, std::size_t k, double a_start, const double* y, const double* z,
                          std::size_t n, double* out);
void profile_moments_scalar(const double* thetas, std::size_t k, double alpha, const double* y, std::size_t n,
                            double* sxy, double* sxx);
#if defined(ADLEARN_HAVE_AVX2)
void nls_objective_avx2(const double* thetas, std::size_t k, double a_start, const double* y, const double* z,
                        std::size_t n, double* out);
void profile_moments_avx2(const double* thetas, std::size_t k, double alpha, const double* y, std::size_t n,
                          double* sxy, double* sxx);
#endif
}  // namespace detail

}  // namespace adlearn::kernels
