#include <cstdlib>
#include <string_view>

#include "adlearn/errors.hpp"
#include "adlearn/kernels.hpp"

namespace adlearn::kernels {

Isa detected_isa() {
#if defined(ADLEARN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  if (has_avx2) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("ADLEARN_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return Isa::scalar;
    return detected_isa();
  }();
  return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace {

[[maybe_unused]] Isa usable(Isa isa) { return isa == Isa::avx2 && detected_isa() != Isa::avx2 ? Isa::scalar : isa; }

}  // namespace

void nls_objective(std::span<const double> thetas, double a_start, std::span<const double> y,
                   std::span<const double> z, std::span<double> out, Isa isa) {
  if (y.size() != z.size()) throw DomainError("nls_objective: y and z lengths differ");
  if (out.size() != thetas.size()) throw DomainError("nls_objective: output size mismatch");
  if (thetas.empty()) return;
#if defined(ADLEARN_HAVE_AVX2)
  if (usable(isa) == Isa::avx2) {
    detail::nls_objective_avx2(thetas.data(), thetas.size(), a_start, y.data(), z.data(), y.size(), out.data());
    return;
  }
#else
  (void)isa;
#endif
  detail::nls_objective_scalar(thetas.data(), thetas.size(), a_start, y.data(), z.data(), y.size(), out.data());
}

double nls_objective_one(double theta, double a_start, std::span<const double> y, std::span<const double> z) {
  if (y.size() != z.size()) throw DomainError("nls_objective: y and z lengths differ");
  double q = 0.0;
  detail::nls_objective_scalar(&theta, 1, a_start, y.data(), z.data(), y.size(), &q);
  return q;
}

void profile_moments(std::span<const double> thetas, double alpha, std::span<const double> y,
                     std::span<double> sxy, std::span<double> sxx, Isa isa) {
  if (sxy.size() != thetas.size() || sxx.size() != thetas.size()) {
    throw DomainError("profile_moments: output size mismatch");
  }
  if (thetas.empty()) return;
#if defined(ADLEARN_HAVE_AVX2)
  if (usable(isa) == Isa::avx2) {
    detail::profile_moments_avx2(thetas.data(), thetas.size(), alpha, y.data(), y.size(), sxy.data(), sxx.data());
    return;
  }
#else
  (void)isa;
#endif
  detail::profile_moments_scalar(thetas.data(), thetas.size(), alpha, y.data(), y.size(), sxy.data(), sxx.data());
}

}  // namespace adlearn::kernels
