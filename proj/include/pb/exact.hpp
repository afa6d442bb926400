#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pb {

// Costs, budgets and bribery counts are arbitrary-precision integers;
// balances, q values and probabilities are exact rationals. Tie comparisons
// in the rules depend on exactness, so no floating point anywhere in the
// engine itself.
using Int = mpz_class;
using Rat = mpq_class;

inline Int binomial(unsigned long n, unsigned long k) {
    Int out;
    if (k > n) return 0;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

inline Rat make_rat(const Int& num, const Int& den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat make_rat(long num, long den) { return make_rat(Int(num), Int(den)); }

// Parses a decimal literal ("0.25", "12", "802000.00", comma decimals too)
// into an exact rational.
inline Rat parse_decimal(const std::string& text) {
    std::string digits;
    long frac_digits = -1;
    bool negative = false;
    size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    for (; i < text.size(); ++i) {
        char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            digits.push_back(ch);
            if (frac_digits >= 0) ++frac_digits;
        } else if ((ch == '.' || ch == ',') && frac_digits < 0) {
            frac_digits = 0;
        } else {
            throw std::invalid_argument("not a decimal number: '" + text + "'");
        }
    }
    if (digits.empty()) throw std::invalid_argument("not a decimal number: '" + text + "'");
    Int num(digits, 10);
    if (negative) num = -num;
    Int den = 1;
    for (long k = 0; k < std::max(frac_digits, 0L); ++k) den *= 10;
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Fixed-point decimal rendering, round-half-away-from-zero at `max_digits`
// fractional digits, trailing zeros trimmed. Deterministic, used for all
// CSV output.
inline std::string format_decimal(const Rat& value, int max_digits = 9) {
    Int num = value.get_num();
    const Int den = value.get_den();
    bool negative = num < 0;
    if (negative) num = -num;
    Int scale = 1;
    for (int k = 0; k < max_digits; ++k) scale *= 10;
    // round(num*scale/den), half away from zero
    Int scaled = num * scale;
    Int q = scaled / den;
    Int rem = scaled - q * den;
    if (2 * rem >= den) ++q;
    std::string body = q.get_str();
    if (static_cast<int>(body.size()) <= max_digits)
        body.insert(0, max_digits + 1 - body.size(), '0');
    std::string head = body.substr(0, body.size() - max_digits);
    std::string tail = body.substr(body.size() - max_digits);
    while (!tail.empty() && tail.back() == '0') tail.pop_back();
    std::string out = negative && (head != "0" || !tail.empty()) ? "-" : "";
    out += head;
    if (!tail.empty()) out += "." + tail;
    return out;
}

inline std::string to_string(const Int& v) { return v.get_str(); }

inline std::string to_string(const Rat& v) {
    if (v.get_den() == 1) return v.get_num().get_str();
    return v.get_num().get_str() + "/" + v.get_den().get_str();
}

// Raised when an enumeration cap or DP memory guard refuses a computation.
struct GuardError : std::runtime_error {
    explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pb
