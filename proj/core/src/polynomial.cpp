#include "reebflow/polynomial.hpp"

#include <cctype>
#include <map>
#include <stdexcept>

namespace reebflow {

RealPoly to_real(const ScalarPoly& p)
{
    std::vector<double> c;
    for (const auto& v : p.coeffs())
        c.push_back(v.to_double());
    return RealPoly(std::move(c));
}

bool is_exact(const ScalarPoly& p)
{
    for (const auto& v : p.coeffs())
        if (!v.is_exact())
            return false;
    return true;
}

namespace {

bool is_var(char ch)
{
    return ch == 's' || ch == 'S' || ch == 'f' || ch == 'x';
}

}  // namespace

ScalarPoly parse_polynomial(const std::string& text)
{
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            t.push_back(ch);
    if (t.empty())
        throw std::invalid_argument("empty polynomial");

    std::map<unsigned, Scalar> acc;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("bad polynomial '" + text + "': " + why);
    };
    bool first = true;
    while (i < t.size()) {
        Scalar sign(1);
        if (t[i] == '+' || t[i] == '-') {
            if (t[i] == '-')
                sign = Scalar(-1);
            ++i;
        } else if (!first) {
            fail("expected + or -");
        }
        first = false;

        Scalar coef(1);
        bool have_coef = false;
        std::size_t j = i;
        while (j < t.size() && (std::isdigit(static_cast<unsigned char>(t[j])) || t[j] == '.' || t[j] == '/'
                                || ((t[j] == 'e' || t[j] == 'E') && j > i)))
            ++j;
        if (j > i) {
            coef = Scalar::parse(t.substr(i, j - i), true);
            have_coef = true;
            i = j;
        }
        if (i < t.size() && t[i] == '*') {
            if (!have_coef)
                fail("dangling '*'");
            ++i;
        }
        unsigned power = 0;
        if (i < t.size() && is_var(t[i])) {
            ++i;
            power = 1;
            if (i < t.size() && t[i] == '^') {
                ++i;
                std::size_t k = i;
                while (k < t.size() && std::isdigit(static_cast<unsigned char>(t[k])))
                    ++k;
                if (k == i)
                    fail("missing exponent");
                power = static_cast<unsigned>(std::stoul(t.substr(i, k - i)));
                i = k;
            }
        } else if (!have_coef) {
            fail("empty term");
        }
        auto it = acc.find(power);
        Scalar term = sign * coef;
        if (it == acc.end())
            acc.emplace(power, term);
        else
            it->second += term;
    }
    std::vector<Scalar> c(acc.empty() ? 0 : acc.rbegin()->first + 1, Scalar(0));
    for (auto& [k, v] : acc)
        c[k] = v;
    return ScalarPoly(std::move(c));
}

std::string format_polynomial(const ScalarPoly& p, char var)
{
    if (p.is_zero())
        return "0";
    std::string out;
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
        const Scalar& v = p.coeffs()[k];
        if (v.is_zero())
            continue;
        std::string s = v.to_string();
        bool neg = !s.empty() && s[0] == '-';
        if (neg)
            s.erase(0, 1);
        if (out.empty())
            out = neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        if (k == 0)
            out += s;
        else {
            if (s != "1")
                out += s + "*";
            out += var;
            if (k > 1)
                out += "^" + std::to_string(k);
        }
    }
    return out;
}

}  // namespace reebflow
