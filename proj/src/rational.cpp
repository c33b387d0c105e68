#include "sds/rational.hpp"

#include <cctype>

namespace sds {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_integer(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto s = trim(text);
    if (s.empty()) throw DomainError("empty rational literal");
    std::string body(s);
    if (body.front() == '+') body.erase(0, 1);

    if (auto dot = body.find('.'); dot != std::string::npos) {
        std::string whole = body.substr(0, dot);
        std::string frac = body.substr(dot + 1);
        bool negative = !whole.empty() && whole.front() == '-';
        if (negative) whole.erase(0, 1);
        if (whole.empty()) whole = "0";
        if (!valid_integer(whole) || (!frac.empty() && !valid_integer(frac)) ||
            (!frac.empty() && (frac.front() == '-' || frac.front() == '+'))) {
            throw DomainError("malformed rational literal: " + std::string(s));
        }
        mpz_class num(whole + frac, 10);
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        Rational q(num, den);
        q.canonicalize();
        return negative ? Rational(-q) : q;
    }

    auto slash = body.find('/');
    std::string num = body.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : body.substr(slash + 1);
    if (!valid_integer(num) || !valid_integer(den) || den.front() == '-' || den.front() == '+') {
        throw DomainError("malformed rational literal: " + std::string(s));
    }
    mpz_class d(den, 10);
    if (d == 0) throw DomainError("zero denominator: " + std::string(s));
    Rational q(mpz_class(num, 10), d);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    return q.get_str(10);
}

std::vector<Rational> parse_rational_list(std::string_view text, char sep) {
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(sep, start);
        if (end == std::string_view::npos) end = text.size();
        auto item = trim(text.substr(start, end - start));
        if (!item.empty()) out.push_back(parse_rational(item));
        start = end + 1;
    }
    return out;
}

}  // namespace sds
