#include "reebflow/scalar.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace reebflow {

const char* to_string(Sign s)
{
    switch (s) {
    case Sign::Negative: return "negative";
    case Sign::Zero: return "zero";
    case Sign::Positive: return "positive";
    case Sign::Indeterminate: return "indeterminate";
    }
    return "?";
}

Scalar::Scalar(long long x)
{
    mpz_class z;
    // mpz has no long long constructor; go through the decimal string
    z.set_str(std::to_string(x), 10);
    v_ = Rational(z);
}

namespace {

bool looks_decimal(const std::string& t)
{
    return t.find_first_of(".eE") != std::string::npos;
}

Rational decimal_to_rational(const std::string& t)
{
    // split mantissa/exponent, then shift the decimal point
    std::string mant = t;
    long exp10 = 0;
    auto epos = t.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = t.substr(0, epos);
        exp10 = std::stol(t.substr(epos + 1));
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (!mant.empty() && mant[0] == '+')
        mant.erase(0, 1);
    mpz_class num;
    if (num.set_str(mant, 10) != 0)
        throw std::invalid_argument("not a number: " + t);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    Rational q = exp10 >= 0 ? Rational(num * p10) : Rational(num, p10);
    q.canonicalize();
    return q;
}

}  // namespace

Scalar Scalar::parse(const std::string& text, bool decimal_exact)
{
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            t.push_back(ch);
    if (t.empty())
        throw std::invalid_argument("empty number");
    if (looks_decimal(t) && t.find('/') == std::string::npos) {
        if (decimal_exact)
            return Scalar(decimal_to_rational(t));
        std::size_t used = 0;
        double d = std::stod(t, &used);
        if (used != t.size())
            throw std::invalid_argument("not a number: " + text);
        return Scalar(d);
    }
    if (t[0] == '+')
        t.erase(0, 1);
    Rational q;
    if (q.set_str(t, 10) != 0)
        throw std::invalid_argument("not a rational: " + text);
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return Scalar(q);
}

const Rational& Scalar::rational() const
{
    if (!is_exact())
        throw std::logic_error("scalar is not exact");
    return std::get<Rational>(v_);
}

double Scalar::to_double() const
{
    if (is_exact())
        return std::get<Rational>(v_).get_d();
    return std::get<double>(v_);
}

Rational Scalar::to_rational() const
{
    if (is_exact())
        return std::get<Rational>(v_);
    double d = std::get<double>(v_);
    if (!std::isfinite(d))
        throw std::domain_error("non-finite value has no rational form");
    return Rational(d);
}

Sign Scalar::sign(double tol) const
{
    if (is_exact()) {
        int s = sgn(std::get<Rational>(v_));
        return s < 0 ? Sign::Negative : (s > 0 ? Sign::Positive : Sign::Zero);
    }
    double d = std::get<double>(v_);
    if (std::isnan(d) || std::fabs(d) <= tol)
        return Sign::Indeterminate;
    return d < 0 ? Sign::Negative : Sign::Positive;
}

bool Scalar::is_zero() const
{
    return is_exact() ? sgn(std::get<Rational>(v_)) == 0 : std::get<double>(v_) == 0.0;
}

std::string Scalar::to_string() const
{
    if (is_exact())
        return std::get<Rational>(v_).get_str();
    std::ostringstream os;
    os.precision(17);
    os << std::get<double>(v_);
    return os.str();
}

Scalar Scalar::operator-() const
{
    if (is_exact())
        return Scalar(Rational(-std::get<Rational>(v_)));
    return Scalar(-std::get<double>(v_));
}

#define REEBFLOW_SCALAR_OP(OP)                                                   \
    Scalar& Scalar::operator OP##=(const Scalar& o)                              \
    {                                                                            \
        if (is_exact() && o.is_exact()) {                                        \
            std::get<Rational>(v_) OP## = std::get<Rational>(o.v_);              \
        } else {                                                                 \
            v_ = to_double() OP o.to_double();                                   \
        }                                                                        \
        return *this;                                                            \
    }

REEBFLOW_SCALAR_OP(+)
REEBFLOW_SCALAR_OP(-)
REEBFLOW_SCALAR_OP(*)
#undef REEBFLOW_SCALAR_OP

Scalar& Scalar::operator/=(const Scalar& o)
{
    if (is_exact() && o.is_exact()) {
        if (sgn(std::get<Rational>(o.v_)) == 0)
            throw std::domain_error("division by exact zero");
        std::get<Rational>(v_) /= std::get<Rational>(o.v_);
    } else {
        v_ = to_double() / o.to_double();
    }
    return *this;
}

bool operator==(const Scalar& a, const Scalar& b)
{
    if (a.is_exact() && b.is_exact())
        return std::get<Rational>(a.v_) == std::get<Rational>(b.v_);
    return a.to_double() == b.to_double();
}

std::partial_ordering operator<=>(const Scalar& a, const Scalar& b)
{
    if (a.is_exact() && b.is_exact()) {
        int c = cmp(std::get<Rational>(a.v_), std::get<Rational>(b.v_));
        return c < 0 ? std::partial_ordering::less
                     : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
    }
    return a.to_double() <=> b.to_double();
}

std::ostream& operator<<(std::ostream& os, const Scalar& s)
{
    return os << s.to_string();
}

Scalar abs(const Scalar& s)
{
    return s < Scalar(0) ? -s : s;
}

Scalar pow(const Scalar& s, unsigned k)
{
    Scalar r(1);
    for (unsigned i = 0; i < k; ++i)
        r *= s;
    return r;
}

}  // namespace reebflow
