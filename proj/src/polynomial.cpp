#include "kstab/polynomial.hpp"

namespace kstab {

Rational standard_simplex_monomial_integral(const Exponent& a) {
  Integer num = 1;
  unsigned total = static_cast<unsigned>(a.size());
  for (int ai : a) {
    num *= factorial(static_cast<unsigned>(ai));
    total += static_cast<unsigned>(ai);
  }
  return Rational(num, factorial(total));
}

}  // namespace kstab
