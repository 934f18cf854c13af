#include "adlearn/special_functions.hpp"

#include <cmath>
#include <string>

#include "adlearn/errors.hpp"

namespace adlearn {

namespace {

constexpr double kShiftTo = 12.0;

// B_2, B_4, ..., B_16
constexpr double kBernoulli[8] = {1.0 / 6.0,    -1.0 / 30.0,   1.0 / 42.0,     -1.0 / 30.0,
                                  5.0 / 66.0,   -691.0 / 2730.0, 7.0 / 6.0,   -3617.0 / 510.0};

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Asymptotic series of psi^(k)(x), valid for large x.
double asymptotic(int k, double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  if (k == 0) {
    double tail = 0.0;
    double p = inv2;
    for (int j = 1; j <= 8; ++j) {
      tail += kBernoulli[j - 1] / (2.0 * j) * p;
      p *= inv2;
    }
    return std::log(x) - 0.5 * inv - tail;
  }
  // (-1)^(k+1) [ (k-1)!/x^k + k!/(2 x^(k+1)) + sum_j B_2j (2j+k-1)!/(2j)! / x^(2j+k) ]
  double xk = std::pow(inv, k);
  double s = factorial(k - 1) * xk + factorial(k) * 0.5 * xk * inv;
  double p = xk * inv2;
  for (int j = 1; j <= 8; ++j) {
    s += kBernoulli[j - 1] * factorial(2 * j + k - 1) / factorial(2 * j) * p;
    p *= inv2;
  }
  return (k % 2 == 1) ? s : -s;
}

}  // namespace

double polygamma(int k, double x) {
  if (k < 0 || k > 3) throw DomainError("polygamma: order must be in 0..3");
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("polygamma: argument must be positive, got " + std::to_string(x));

  // psi^(k)(x) = psi^(k)(x + 1) - (-1)^k k! / x^(k+1)
  int shifts = 0;
  double xs = x;
  while (xs < kShiftTo) {
    xs += 1.0;
    ++shifts;
  }
  const double kf = factorial(k);
  // Smallest corrections first.
  double corr = 0.0;
  for (int i = shifts - 1; i >= 0; --i) corr += kf / std::pow(x + i, k + 1);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return asymptotic(k, xs) - sign * corr;
}

double digamma(double x) { return polygamma(0, x); }

double zeta_tail(int k, double x) {
  if (k < 1 || k > 4) throw DomainError("zeta_tail: order must be in 1..4");
  const double v = polygamma(k - 1, x) / factorial(k - 1);
  return (k % 2 == 0) ? v : -v;
}

}  // namespace adlearn
