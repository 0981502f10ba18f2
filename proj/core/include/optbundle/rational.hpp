#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace optbundle {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

BigInt floor(const Rational& r);
BigInt ceil(const Rational& r);
bool is_integer(const Rational& r);

// Round half up (towards +inf on ties) to a 64-bit integer.
std::int64_t round_half_up(const Rational& r);

// "3/4", "-2", "15".
std::string to_string(const Rational& r);

}  // namespace optbundle
