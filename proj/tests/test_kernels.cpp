#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "adlearn/errors.hpp"
#include "adlearn/kernels.hpp"
#include "adlearn/model.hpp"
#include "oracles.hpp"

using namespace adlearn;
namespace K = adlearn::kernels;

namespace {

std::vector<double> grid(std::size_t k, double lo, double hi) {
  std::vector<double> g(k);
  for (std::size_t i = 0; i < k; ++i) g[i] = k == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
  return g;
}

double objective_by_filter(double theta, double a_start, const std::vector<double>& y, const std::vector<double>& z) {
  const std::vector<double> a = filter_candidate(theta, a_start, y);
  double q = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double e = z[t] - a[t];
    q += e * e;
  }
  return q;
}

}  // namespace

TEST_CASE("isa reporting") {
  CHECK((K::detected_isa() == K::Isa::scalar || K::detected_isa() == K::Isa::avx2));
  CHECK(std::string(K::isa_name(K::Isa::scalar)) == "scalar");
  CHECK(std::string(K::isa_name(K::Isa::avx2)) == "avx2");
  MESSAGE("active kernel variant: " << std::string(K::isa_name(K::active_isa())));
}

TEST_CASE("scalar NLS objective equals the filter-based sum") {
  const auto y = oracle::normals(3000, 1);
  auto z = oracle::normals(3000, 2);
  const auto thetas = grid(13, 1.05, 6.0);
  std::vector<double> out(thetas.size());
  K::nls_objective(thetas, 0.3, y, z, out, K::Isa::scalar);
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    CHECK(out[k] == objective_by_filter(thetas[k], 0.3, y, z));
    CHECK(out[k] == K::nls_objective_one(thetas[k], 0.3, y, z));
  }
}

TEST_CASE("AVX2 kernels are bitwise identical to scalar") {
  if (K::detected_isa() != K::Isa::avx2) {
    MESSAGE("AVX2 not available on this CPU; the dispatcher falls back to scalar");
  }
  for (std::size_t k : {1u, 3u, 4u, 7u, 8u, 9u, 13u, 16u, 64u}) {
    for (std::size_t n : {1u, 2u, 5u, 1000u, 20000u}) {
      const auto y = oracle::normals(n, 10 + k);
      const auto z = oracle::normals(n, 20 + n);
      const auto thetas = grid(k, 1.05, 6.0);
      std::vector<double> s(k), v(k);
      K::nls_objective(thetas, -0.7, y, z, s, K::Isa::scalar);
      K::nls_objective(thetas, -0.7, y, z, v, K::Isa::avx2);
      for (std::size_t i = 0; i < k; ++i) CHECK(s[i] == v[i]);

      std::vector<double> sxy_s(k), sxx_s(k), sxy_v(k), sxx_v(k);
      K::profile_moments(thetas, 0.4, y, sxy_s, sxx_s, K::Isa::scalar);
      K::profile_moments(thetas, 0.4, y, sxy_v, sxx_v, K::Isa::avx2);
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(sxy_s[i] == sxy_v[i]);
        CHECK(sxx_s[i] == sxx_v[i]);
      }
    }
  }
}

TEST_CASE("profile moments equal sums over the centred filter") {
  const auto y = oracle::normals(2500, 3);
  const double alpha = 0.8;
  std::vector<double> ys(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) ys[t] = y[t] - alpha;
  const auto thetas = grid(9, 1.2, 5.0);
  std::vector<double> sxy(thetas.size()), sxx(thetas.size());
  K::profile_moments(thetas, alpha, y, sxy, sxx);
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const auto a = filter_candidate(thetas[k], 0.0, ys);
    long double xy = 0.0L, xx = 0.0L;
    for (std::size_t t = 0; t < y.size(); ++t) {
      xy += static_cast<long double>(ys[t]) * a[t];
      xx += static_cast<long double>(a[t]) * a[t];
    }
    CHECK(sxy[k] == doctest::Approx(static_cast<double>(xy)).epsilon(1e-12));
    CHECK(sxx[k] == doctest::Approx(static_cast<double>(xx)).epsilon(1e-12));
  }
}

TEST_CASE("kernel argument checks") {
  const std::vector<double> y(10, 1.0), z(9, 1.0), th{2.0};
  std::vector<double> out(1), bad(2);
  CHECK_THROWS_AS(K::nls_objective(th, 0.0, y, z, out), DomainError);
  CHECK_THROWS_AS(K::nls_objective(th, 0.0, y, y, bad), DomainError);
  CHECK_THROWS_AS(K::profile_moments(th, 0.0, y, bad, out), DomainError);
}
