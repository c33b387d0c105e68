#pragma once

#include "sds/core.hpp"

#include <string>
#include <vector>

namespace sds::test {

inline Rational q(long p, long d = 1) { return make_rational(p, d); }

inline std::vector<Rational> qs(std::initializer_list<Rational> values) { return std::vector<Rational>(values); }

// "abc" -> a > b > c with a = 0, b = 1, ...
inline PreferenceRelation pr(std::string_view order) {
    std::vector<Alternative> v;
    for (char c : order) v.push_back(c - 'a');
    return PreferenceRelation(v);
}

inline Profile prof(std::initializer_list<std::string_view> orders) {
    std::vector<PreferenceRelation> prefs;
    for (auto o : orders) prefs.push_back(pr(o));
    const int m = prefs.front().size();
    return Profile(m, std::move(prefs));
}

inline Lottery lot(std::initializer_list<Rational> values) { return Lottery(std::vector<Rational>(values)); }

}  // namespace sds::test
