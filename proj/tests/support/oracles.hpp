#pragma once

// Independent reference implementations used only by the tests.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/rational.hpp"

namespace cwchaos::oracle {

// H_{p,q} in one variable from the three-term recurrences
//   H_{p+1,q} = z H_{p,q} - q H_{p,q-1},  H_{p,q+1} = zbar H_{p,q} - p H_{p-1,q}.
CWPoly hermite_by_recurrence(unsigned p, unsigned q);

// E[f(Z)], Z ~ CN(0, sigma), by summing over every bijection between the
// z-factors and the zbar-factors of each monomial (factors listed with
// multiplicity, so the sum has k! terms for k pairs).
RationalComplex wick_by_pairings(const CWPoly& f, const RationalMatrix& sigma);

// Minimum over all permutations of the row-ordered sum of c(i, pi(i)), divided by n.
double assignment_by_permutations(const Eigen::MatrixXd& c);

// Rational r / s with s > 0, canonicalized.
Rational q(long r, long s = 1);

}  // namespace cwchaos::oracle
