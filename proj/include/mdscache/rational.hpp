/**************************************************************************
 * rational.hpp
 *
 * Copyright 2026 The mdscache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace mdscache {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline BigInt numerator(const Rational& x) { return boost::multiprecision::numerator(x); }
inline BigInt denominator(const Rational& x) { return boost::multiprecision::denominator(x); }

inline bool is_integer(const Rational& x) { return denominator(x) == 1; }

/// Binomial coefficient; zero whenever k < 0, n < 0 or k > n.
inline BigInt binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i; // exact: result is C(n-k+i, i) here
    }
    return result;
}

inline Rational power(const Rational& base, std::uint64_t exponent) {
    Rational result = 1;
    Rational b = base;
    while (exponent != 0) {
        if (exponent & 1U) result *= b;
        exponent >>= 1U;
        if (exponent != 0) b *= b;
    }
    return result;
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline BigInt rational_floor(const Rational& x) { return floor_div(numerator(x), denominator(x)); }

inline BigInt rational_ceil(const Rational& x) { return -floor_div(-numerator(x), denominator(x)); }

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Canonical "p/q" form, or "p" when the denominator is one.
inline std::string to_string(const Rational& x) {
    if (is_integer(x)) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

/// Correctly rounded (half away from zero) decimal with `digits`
/// significant digits, computed without floating point.
inline std::string to_decimal(const Rational& x, int digits = 12) {
    if (x == 0) return "0";
    const bool negative = x < 0;
    const BigInt num = boost::multiprecision::abs(numerator(x));
    const BigInt den = denominator(x);

    // Find e with 10^e <= |x| < 10^(e+1).
    int e = static_cast<int>(num.str().size()) - static_cast<int>(den.str().size());
    auto scaled_ge = [&](int exp10) {
        // |x| >= 10^exp10 ?
        if (exp10 >= 0) return num >= den * boost::multiprecision::pow(BigInt(10), exp10);
        return num * boost::multiprecision::pow(BigInt(10), -exp10) >= den;
    };
    while (!scaled_ge(e)) --e;
    while (scaled_ge(e + 1)) ++e;

    // mantissa = round(|x| * 10^(digits-1-e))
    const int shift = digits - 1 - e;
    BigInt n = num, d = den;
    if (shift >= 0) n *= boost::multiprecision::pow(BigInt(10), shift);
    else d *= boost::multiprecision::pow(BigInt(10), -shift);
    BigInt mant = (2 * n + d) / (2 * d);
    int exp_out = e;
    if (mant.str().size() > static_cast<std::size_t>(digits)) {
        mant /= 10;
        ++exp_out;
    }
    std::string m = mant.str();
    // Strip trailing zeros of the mantissa.
    while (m.size() > 1 && m.back() == '0') m.pop_back();

    std::string out;
    if (exp_out >= 0 && exp_out < digits) {
        if (static_cast<int>(m.size()) <= exp_out + 1) {
            out = m + std::string(exp_out + 1 - m.size(), '0');
        } else {
            out = m.substr(0, exp_out + 1) + "." + m.substr(exp_out + 1);
        }
    } else if (exp_out < 0 && exp_out >= -5) {
        out = "0." + std::string(-exp_out - 1, '0') + m;
    } else {
        out = m.substr(0, 1);
        if (m.size() > 1) out += "." + m.substr(1);
        out += "e" + std::to_string(exp_out);
    }
    return negative ? "-" + out : out;
}

/// Parses "p", "p/q" or a plain decimal literal such as "1.25".
inline Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw InvalidParams("not a rational literal: '" + std::string(text) + "'");
    };
    auto is_int = [](std::string_view s) {
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    auto to_int = [](std::string_view s) {
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        return BigInt(std::string(s));
    };
    if (text.empty()) return fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto p = text.substr(0, slash), q = text.substr(slash + 1);
        if (!is_int(p) || !is_int(q)) return fail();
        BigInt den = to_int(q);
        if (den == 0) return fail();
        return Rational(to_int(p), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole = text.substr(0, dot), frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole.front() == '-';
        if (whole.empty() || whole == "-" || whole == "+") whole = "0";
        if (!is_int(whole) || frac.empty() || !is_int(frac) || frac.front() == '-' || frac.front() == '+')
            return fail();
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
        BigInt w = boost::multiprecision::abs(to_int(whole));
        Rational v(w * scale + to_int(frac), scale);
        return negative ? Rational(-v) : v;
    }
    if (!is_int(text)) return fail();
    return Rational(to_int(text));
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
    return a / boost::multiprecision::gcd(a, b) * b;
}

} // namespace mdscache
