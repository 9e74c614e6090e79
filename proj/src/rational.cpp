#include "tefkit/rational.hpp"

#include <cctype>

namespace tefkit {

namespace {

bool is_integer_text(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        if (!is_integer_text(num) || !is_integer_text(den)) {
            throw InputError("bad rational literal: '" + text + "'");
        }
        const Integer parsed_num(num), parsed_den(den);
        if (parsed_den == 0) throw InputError("zero denominator in '" + text + "'");
        Rational q(parsed_num, parsed_den);
        q.canonicalize();
        return q;
    }
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
        // Exact decimal: d.ffff -> (d*10^k + ffff) / 10^k.
        std::string head = text.substr(0, dot);
        const std::string frac = text.substr(dot + 1);
        bool neg = false;
        if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
            neg = head[0] == '-';
            head = head.substr(1);
        }
        if (head.empty()) head = "0";
        if (!is_integer_text(head) || frac.empty() || !is_integer_text(frac)) {
            throw InputError("bad decimal literal: '" + text + "'");
        }
        Integer scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        Integer numerator = Integer(head) * scale + Integer(frac);
        if (neg) numerator = -numerator;
        Rational q(numerator, scale);
        q.canonicalize();
        return q;
    }
    if (!is_integer_text(text)) {
        throw InputError("bad rational literal: '" + text + "'");
    }
    return Rational(Integer(text));
}

std::string format_rational(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational pow5(unsigned long e) {
    Integer z;
    mpz_ui_pow_ui(z.get_mpz_t(), 5, e);
    return Rational(z);
}

}  // namespace tefkit
