#include <cstddef>

#include "adlearn/kernels.hpp"

namespace adlearn::kernels::detail {

void nls_objective_scalar(const double* thetas, std::size_t k, double a_start, const double* y, const double* z,
                          std::size_t n, double* out) {
  for (std::size_t lane = 0; lane < k; ++lane) {
    const double theta = thetas[lane];
    double a = a_start;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = z[i] - a;
      q += d * d;
      a = a + (theta / static_cast<double>(i + 1)) * (y[i] - a);
    }
    out[lane] = q;
  }
}

void profile_moments_scalar(const double* thetas, std::size_t k, double alpha, const double* y, std::size_t n,
                            double* sxy, double* sxx) {
  for (std::size_t lane = 0; lane < k; ++lane) {
    const double theta = thetas[lane];
    double a = 0.0;
    double xy = 0.0;
    double xx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ys = y[i] - alpha;
      xy += ys * a;
      xx += a * a;
      a = a + (theta / static_cast<double>(i + 1)) * (ys - a);
    }
    sxy[lane] = xy;
    sxx[lane] = xx;
  }
}

}  // namespace adlearn::kernels::detail
