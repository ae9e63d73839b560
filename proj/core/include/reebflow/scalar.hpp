#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <string>
#include <variant>

namespace reebflow {

using Rational = mpq_class;

// Outcome of a sign test. Indeterminate only arises for floating values that
// fall inside the comparison threshold.
enum class Sign { Negative = -1, Zero = 0, Positive = 1, Indeterminate = 2 };

const char* to_string(Sign s);

// A real number that is either an exact rational or a double. Arithmetic stays
// exact while both operands are exact and degrades to double otherwise.
class Scalar {
public:
    Scalar() : v_(Rational(0)) {}
    Scalar(int x) : v_(Rational(x)) {}
    Scalar(long x) : v_(Rational(x)) {}
    Scalar(long long x);
    Scalar(double x) : v_(x) {}
    Scalar(const Rational& q) : v_(q) { std::get<Rational>(v_).canonicalize(); }

    // Accepts "p", "p/q", or a decimal/scientific literal (which yields a double
    // unless `decimal_exact` is set, in which case decimals become rationals).
    static Scalar parse(const std::string& text, bool decimal_exact = false);

    bool is_exact() const { return std::holds_alternative<Rational>(v_); }
    const Rational& rational() const;
    double to_double() const;

    // Returns the exact value; doubles are converted to their binary value.
    Rational to_rational() const;
    Scalar as_float() const { return Scalar(to_double()); }

    Sign sign(double tol = 1e-9) const;
    bool is_zero() const;

    std::string to_string() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    // Exact comparison when both are exact, otherwise compares doubles.
    friend bool operator==(const Scalar& a, const Scalar& b);
    friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b);

private:
    std::variant<Rational, double> v_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

Scalar abs(const Scalar& s);
Scalar pow(const Scalar& s, unsigned k);

}  // namespace reebflow
