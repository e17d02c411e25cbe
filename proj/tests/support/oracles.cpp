#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

namespace cwchaos::oracle {

Rational q(long r, long s) {
  Rational x(r, s);
  x.canonicalize();
  return x;
}

CWPoly hermite_by_recurrence(unsigned p, unsigned q_) {
  std::map<std::pair<unsigned, unsigned>, CWPoly> h;
  const CWPoly z = CWPoly::z(1, 0), zb = CWPoly::zbar(1, 0);
  h[{0, 0}] = CWPoly::constant(1, 1);
  for (unsigned total = 1; total <= p + q_; ++total)
    for (unsigned a = 0; a <= total; ++a) {
      const unsigned b = total - a;
      if (a > p || b > q_) continue;
      CWPoly v(1);
      if (a > 0) {
        v = z * h.at({a - 1, b});
        if (b > 0) v -= h.at({a - 1, b - 1}) * RationalComplex(static_cast<long>(b));
      } else {
        v = zb * h.at({a, b - 1});
      }
      h[{a, b}] = v;
    }
  return h.at({p, q_});
}

RationalComplex wick_by_pairings(const CWPoly& f, const RationalMatrix& sigma) {
  RationalComplex total;
  for (const auto& [mono, coeff] : f.terms()) {
    std::vector<std::size_t> zs, zbs;
    for (const auto& fac : mono.factors()) {
      zs.insert(zs.end(), fac.p, fac.var);
      zbs.insert(zbs.end(), fac.q, fac.var);
    }
    if (zs.size() != zbs.size()) continue;
    std::vector<std::size_t> perm(zbs.size());
    std::iota(perm.begin(), perm.end(), 0);
    RationalComplex sum;
    do {
      RationalComplex prod(1);
      for (std::size_t i = 0; i < zs.size(); ++i) prod *= sigma(zs[i], zbs[perm[i]]);
      sum += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    total += coeff * sum;
  }
  return total;
}

double assignment_by_permutations(const Eigen::MatrixXd& c) {
  const auto n = static_cast<std::size_t>(c.rows());
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c(static_cast<Eigen::Index>(i), perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

}  // namespace cwchaos::oracle
