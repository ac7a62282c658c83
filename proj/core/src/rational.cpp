#include "cpdcert/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace cpdcert {

Rat parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return Rat(num, den);
    }
    const auto dot = text.find('.');
    const auto exp = text.find_first_of("eE");
    if (dot == std::string::npos && exp == std::string::npos) {
        return Rat(BigInt(text));
    }
    // Decimal (possibly scientific) literal; parse exactly.
    std::string mantissa = exp == std::string::npos ? text : text.substr(0, exp);
    long expo = exp == std::string::npos ? 0 : std::strtol(text.c_str() + exp + 1, nullptr, 10);
    const auto d = mantissa.find('.');
    std::string digits = mantissa;
    if (d != std::string::npos) {
        digits = mantissa.substr(0, d) + mantissa.substr(d + 1);
        expo -= static_cast<long>(mantissa.size() - d - 1);
    }
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("bad rational literal '" + text + "'");
    Rat value{BigInt(digits)};
    BigInt ten(10);
    if (expo > 0) {
        for (long i = 0; i < expo; ++i) value *= ten;
    } else {
        for (long i = 0; i < -expo; ++i) value /= ten;
    }
    return value;
}

Rat rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    if (x == 0.0) return Rat(0);
    int e = 0;
    double m = std::frexp(x, &e); // x = m * 2^e, 0.5 <= |m| < 1
    // 53 bits of mantissa make m * 2^53 an integer.
    BigInt num(static_cast<long long>(std::ldexp(m, 53)));
    e -= 53;
    Rat value(num);
    BigInt two(2);
    if (e > 0) {
        BigInt p(1);
        for (int i = 0; i < e; ++i) p *= two;
        value *= Rat(p);
    } else if (e < 0) {
        BigInt p(1);
        for (int i = 0; i < -e; ++i) p *= two;
        value /= Rat(p);
    }
    return value;
}

std::string rational_to_string(const Rat& q) {
    const BigInt num = numerator(q);
    const BigInt den = denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rat& q) { return q.convert_to<double>(); }

} // namespace cpdcert
