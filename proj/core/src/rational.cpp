#include "optbundle/rational.hpp"

namespace optbundle {

BigInt floor(const Rational& r) {
  const BigInt& n = numerator(r);
  const BigInt& d = denominator(r);  // always positive
  BigInt q = n / d;
  if (n < 0 && q * d != n) --q;
  return q;
}

BigInt ceil(const Rational& r) {
  return -floor(-r);
}

bool is_integer(const Rational& r) {
  return denominator(r) == 1;
}

std::int64_t round_half_up(const Rational& r) {
  return floor(r + Rational(1, 2)).convert_to<std::int64_t>();
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace optbundle
