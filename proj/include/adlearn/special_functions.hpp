#pragma once

namespace adlearn {

// psi(x) for x > 0. Shifts the argument up by the recurrence until x >= 12 and
// finishes with the asymptotic expansion.
double digamma(double x);

// psi^(k)(x) for k in 0..3 and x > 0 (k = 0 is digamma).
double polygamma(int k, double x);

// Hurwitz-type tail sum sum_{i>=0} (x + i)^(-k) for k in 1..4 (k = 1 is
// divergent and instead returns -psi(x)), expressed through polygamma:
// zeta_k(x) = (-1)^k psi^(k-1)(x) / (k-1)!.
double zeta_tail(int k, double x);

}  // namespace adlearn
