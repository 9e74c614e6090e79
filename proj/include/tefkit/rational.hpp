#pragma once

#include <gmpxx.h>

#include <string>

#include "tefkit/errors.hpp"

namespace tefkit {

// All valuations and welfare values are exact rationals. GMP keeps them in
// canonical reduced form (gcd(|num|,den) = 1, den > 0); no rounding anywhere.
using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "num/den", plain integers ("-3"), and decimal strings ("0.15",
// "-1.1"), all parsed exactly. Throws InputError on anything else.
Rational parse_rational(const std::string& text);

// Canonical text form: "num" when den == 1, else "num/den".
std::string format_rational(const Rational& q);

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// 5^e as an exact integer-valued rational; the hardness gadgets live on these.
Rational pow5(unsigned long e);

}  // namespace tefkit
