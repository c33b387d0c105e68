#include "sds/core.hpp"

#include "sds/lp.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace sds {

// --- PreferenceRelation ------------------------------------------------------

PreferenceRelation::PreferenceRelation(const std::vector<Alternative>& order) {
    const int m = static_cast<int>(order.size());
    if (m < 1 || m > kMaxAlternatives) {
        throw DomainError("preference relation needs between 1 and " + std::to_string(kMaxAlternatives) +
                          " alternatives");
    }
    std::array<bool, kMaxAlternatives> seen{};
    for (int pos = 0; pos < m; ++pos) {
        Alternative x = order[pos];
        if (x < 0 || x >= m || seen[x]) throw DomainError("preference relation is not a permutation");
        seen[x] = true;
        order_[pos] = static_cast<std::uint8_t>(x);
        rank_[x] = static_cast<std::uint8_t>(pos + 1);
    }
    m_ = m;
}

PreferenceRelation PreferenceRelation::identity(int m) {
    std::vector<Alternative> order(m);
    std::iota(order.begin(), order.end(), 0);
    return PreferenceRelation(order);
}

PreferenceRelation PreferenceRelation::canonical_with_top(int m, Alternative top) {
    if (top < 0 || top >= m) throw DomainError("alternative out of range");
    std::vector<Alternative> order{top};
    for (Alternative x = 0; x < m; ++x) {
        if (x != top) order.push_back(x);
    }
    return PreferenceRelation(order);
}

const std::vector<PreferenceRelation>& PreferenceRelation::all(int m) {
    if (m < 1 || m > kMaxAlternatives) throw DomainError("unsupported number of alternatives");
    static std::mutex mutex;
    static std::map<int, std::vector<PreferenceRelation>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    std::vector<PreferenceRelation> out;
    std::vector<Alternative> order(m);
    std::iota(order.begin(), order.end(), 0);
    do {
        out.emplace_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return cache.emplace(m, std::move(out)).first->second;
}

PreferenceRelation PreferenceRelation::from_index(int m, std::size_t index) {
    const auto& prefs = all(m);
    if (index >= prefs.size()) throw DomainError("preference index out of range");
    return prefs[index];
}

int PreferenceRelation::rank(Alternative x) const {
    if (x < 0 || x >= m_) throw DomainError("alternative out of range");
    return rank_[x];
}

std::vector<Alternative> PreferenceRelation::order() const {
    return std::vector<Alternative>(order_.begin(), order_.begin() + m_);
}

std::size_t PreferenceRelation::index() const {
    // Lehmer code of the best-first sequence.
    std::size_t idx = 0;
    std::array<bool, kMaxAlternatives> used{};
    for (int pos = 0; pos < m_; ++pos) {
        int smaller = 0;
        for (int x = 0; x < order_[pos]; ++x) {
            if (!used[x]) ++smaller;
        }
        used[order_[pos]] = true;
        idx = idx * static_cast<std::size_t>(m_ - pos) + static_cast<std::size_t>(smaller);
    }
    return idx;
}

std::string PreferenceRelation::to_string(const std::vector<std::string>* names) const {
    std::string out;
    for (int pos = 0; pos < m_; ++pos) {
        if (pos) out += " > ";
        out += names ? (*names)[order_[pos]] : std::to_string(order_[pos]);
    }
    return out;
}

// --- Profile -----------------------------------------------------------------

Profile::Profile(int m, std::vector<PreferenceRelation> prefs) : m_(m), prefs_(std::move(prefs)) {
    if (prefs_.empty()) throw DomainError("a profile needs at least one voter");
    for (const auto& p : prefs_) {
        if (p.size() != m) throw DomainError("all preference relations must range over the same alternatives");
    }
}

Profile Profile::with_voter(int voter, const PreferenceRelation& pref) const {
    if (voter < 0 || voter >= voters()) throw DomainError("voter out of range");
    Profile out = *this;
    out.prefs_[voter] = pref;
    return out;
}

std::vector<int> Profile::top_counts() const {
    std::vector<int> counts(m_, 0);
    for (const auto& p : prefs_) ++counts[p.top()];
    return counts;
}

std::vector<Alternative> Profile::top_set() const {
    auto counts = top_counts();
    std::vector<Alternative> out;
    for (Alternative x = 0; x < m_; ++x) {
        if (counts[x] > 0) out.push_back(x);
    }
    return out;
}

std::vector<std::size_t> Profile::preference_indices() const {
    std::vector<std::size_t> out;
    out.reserve(prefs_.size());
    for (const auto& p : prefs_) out.push_back(p.index());
    return out;
}

// --- Lottery -----------------------------------------------------------------

Lottery::Lottery(std::vector<Rational> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DomainError("a lottery needs at least one alternative");
    Rational total;
    for (auto& p : probs_) {
        p.canonicalize();
        if (p < 0) throw DomainError("lottery has a negative probability");
        total += p;
    }
    if (total != 1) throw DomainError("lottery probabilities sum to " + sds::to_string(total) + ", not 1");
}

Lottery Lottery::point(int m, Alternative x) {
    if (x < 0 || x >= m) throw DomainError("alternative out of range");
    std::vector<Rational> probs(m);
    probs[x] = 1;
    return Lottery(std::move(probs));
}

Lottery Lottery::uniform(int m) {
    return Lottery(std::vector<Rational>(m, Rational(1, m)));
}

Lottery Lottery::uniform_over(int m, const std::vector<Alternative>& support) {
    if (support.empty()) throw DomainError("uniform lottery over an empty set");
    std::vector<Rational> probs(m);
    Rational share(1, static_cast<long>(support.size()));
    for (Alternative x : support) {
        if (x < 0 || x >= m) throw DomainError("alternative out of range");
        probs[x] += share;
    }
    return Lottery(std::move(probs));
}

std::vector<Alternative> Lottery::support() const {
    std::vector<Alternative> out;
    for (Alternative x = 0; x < size(); ++x) {
        if (sgn(probs_[x]) > 0) out.push_back(x);
    }
    return out;
}

std::string Lottery::to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (i) out += ", ";
        out += sds::to_string(probs_[i]);
    }
    return out + ")";
}

Lottery mix(const Lottery& p, const Lottery& q, const Rational& lambda) {
    if (lambda < 0 || lambda > 1) throw DomainError("mixing weight outside [0, 1]");
    if (p.size() != q.size()) throw DomainError("lotteries over different alternative counts");
    std::vector<Rational> probs(p.size());
    for (Alternative x = 0; x < p.size(); ++x) probs[x] = lambda * p[x] + (1 - lambda) * q[x];
    return Lottery(std::move(probs));
}

// --- UtilityVector -------------------------------------------------------------

namespace {

void check_weak(const std::vector<Rational>& v) {
    if (v.empty()) throw DomainError("utility vector is empty");
    for (std::size_t r = 0; r + 1 < v.size(); ++r) {
        if (v[r] < v[r + 1]) throw DomainError("utility vector must be non-increasing in rank");
    }
    if (v.size() > 1 && v.front() == v.back()) throw DomainError("utility vector is constant");
}

}  // namespace

UtilityVector::UtilityVector(std::vector<Rational> values) : values_(std::move(values)) {
    for (auto& v : values_) v.canonicalize();
    if (values_.empty()) throw DomainError("utility vector is empty");
    if (!strict()) throw DomainError("utility vector must be strictly decreasing: " + to_string());
}

UtilityVector UtilityVector::closure_point(std::vector<Rational> values) {
    for (auto& v : values) v.canonicalize();
    check_weak(values);
    UtilityVector u;
    u.values_ = std::move(values);
    return u;
}

bool UtilityVector::strict() const {
    for (std::size_t r = 0; r + 1 < values_.size(); ++r) {
        if (!(values_[r] > values_[r + 1])) return false;
    }
    return true;
}

std::string UtilityVector::to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ", ";
        out += sds::to_string(values_[i]);
    }
    return out + ")";
}

// --- UtilitySet ----------------------------------------------------------------

std::string preset_name(const PresetTag& tag) {
    switch (tag.preset) {
        case UtilityPreset::sd: return "SD";
        case UtilityPreset::rdk: return "RDK(" + std::to_string(tag.k) + ")";
        case UtilityPreset::omni: return "OMNI";
        case UtilityPreset::equidistant: return "EQUIDISTANT";
        case UtilityPreset::eps_indiff: return "EPS_INDIFF(" + sds::to_string(tag.epsilon) + ")";
    }
    return "?";
}

namespace {

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational s;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool constraint_holds(const RankConstraint& c, const std::vector<Rational>& u) {
    Rational v = dot(c.coeffs, u);
    switch (c.rel) {
        case UtilityRelation::le: return v <= 0;
        case UtilityRelation::eq: return v == 0;
        case UtilityRelation::ge: return v >= 0;
    }
    return false;
}

lp::Relation to_lp(UtilityRelation rel) {
    switch (rel) {
        case UtilityRelation::le: return lp::Relation::le;
        case UtilityRelation::eq: return lp::Relation::eq;
        case UtilityRelation::ge: return lp::Relation::ge;
    }
    return lp::Relation::eq;
}

// Solves the square system A x = b exactly; nullopt when singular.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = n;
        for (std::size_t r = col; r < n; ++r) {
            if (sgn(a[r][col]) != 0) {
                piv = r;
                break;
            }
        }
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || sgn(a[r][col]) == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

}  // namespace

UtilitySet UtilitySet::finite(std::vector<UtilityVector> vectors) {
    if (vectors.empty()) throw DomainError("finite utility set is empty");
    const int m = vectors.front().size();
    for (const auto& u : vectors) {
        if (u.size() != m) throw DomainError("utility vectors of different lengths");
        if (!u.strict()) throw DomainError("finite utility sets need strictly decreasing vectors");
    }
    UtilitySet set(Kind::finite, m, vectors.front());
    set.vectors_ = std::move(vectors);
    return set;
}

UtilitySet UtilitySet::vertex_list(std::vector<UtilityVector> vertices) {
    if (vertices.empty()) throw DomainError("vertex list is empty");
    const int m = vertices.front().size();
    std::vector<Rational> centroid(m);
    for (const auto& u : vertices) {
        if (u.size() != m) throw DomainError("utility vectors of different lengths");
        for (int r = 0; r < m; ++r) centroid[r] += u.values()[r];
    }
    for (auto& c : centroid) c /= static_cast<long>(vertices.size());
    UtilityVector probe = UtilityVector::closure_point(centroid);
    if (!probe.strict()) throw DomainError("vertex hull contains no strictly decreasing utility vector");
    UtilitySet set(Kind::vertices, m, UtilityVector(centroid));
    set.vectors_ = std::move(vertices);
    return set;
}

UtilitySet UtilitySet::polytope(int m, std::vector<RankConstraint> constraints, std::optional<PresetTag> tag) {
    if (m < 2) throw DomainError("utility polytopes need at least two alternatives");
    for (const auto& c : constraints) {
        if (static_cast<int>(c.coeffs.size()) != m) throw DomainError("constraint length differs from m");
        Rational total;
        for (const auto& a : c.coeffs) total += a;
        if (total != 0) {
            throw DomainError("polytope constraints must be invariant under adding a constant to u");
        }
    }
    // maximise t s.t. u(r) - u(r+1) >= t, u(1) = 1, u(m) = 0, constraints.
    lp::LinearProgram prog;
    std::vector<std::size_t> u(m);
    for (int r = 0; r < m; ++r) u[r] = prog.add_variable(std::nullopt, std::nullopt);
    std::size_t t = prog.add_variable(std::nullopt, Rational(1));
    prog.add({{u[0], 1}}, lp::Relation::eq, 1);
    prog.add({{u[m - 1], 1}}, lp::Relation::eq, 0);
    for (int r = 0; r + 1 < m; ++r) {
        prog.add({{u[r], 1}, {u[r + 1], -1}, {t, -1}}, lp::Relation::ge, 0);
    }
    for (const auto& c : constraints) {
        std::vector<lp::Term> terms;
        for (int r = 0; r < m; ++r) terms.push_back({u[r], c.coeffs[r]});
        prog.add(std::move(terms), to_lp(c.rel), 0);
    }
    prog.objective = {{t, 1}};
    auto outcome = lp::solve(prog);
    const auto* opt = std::get_if<lp::Optimal>(&outcome);
    if (!opt || sgn(opt->value) <= 0) {
        throw DomainError("utility polytope has no strictly decreasing point");
    }
    std::vector<Rational> interior(opt->point.begin(), opt->point.begin() + m);
    UtilitySet set(Kind::polytope, m, UtilityVector(interior));
    set.constraints_ = std::move(constraints);
    set.preset_ = std::move(tag);
    return set;
}

UtilitySet UtilitySet::sd(int m) {
    return polytope(m, {}, PresetTag{.preset = UtilityPreset::sd});
}

// u(1) - u(2) >= k (u(2) - u(m))
UtilitySet UtilitySet::rdk(int m, int k) {
    if (m < 3) throw DomainError("RDK preset needs m >= 3");
    if (k < 1) throw DomainError("RDK preset needs k >= 1");
    std::vector<Rational> c(m);
    c[0] += 1;
    c[1] += -1 - k;
    c[m - 1] += k;
    return polytope(m, {RankConstraint{c, UtilityRelation::ge}}, PresetTag{.preset = UtilityPreset::rdk, .k = k});
}

// u(1) - u(2) >= sum_{i=3}^m (u(2) - u(i))
UtilitySet UtilitySet::omni(int m) {
    if (m < 3) throw DomainError("OMNI preset needs m >= 3");
    std::vector<Rational> c(m);
    c[0] = 1;
    c[1] = -1 - (m - 2);
    for (int i = 2; i < m; ++i) c[i] = 1;
    return polytope(m, {RankConstraint{c, UtilityRelation::ge}}, PresetTag{.preset = UtilityPreset::omni});
}

// u(1) - u(2) = u(2) - u(3)
UtilitySet UtilitySet::equidistant(int m) {
    if (m < 3) throw DomainError("EQUIDISTANT preset needs m >= 3");
    std::vector<Rational> c(m);
    c[0] = 1;
    c[1] = -2;
    c[2] = 1;
    return polytope(m, {RankConstraint{c, UtilityRelation::eq}}, PresetTag{.preset = UtilityPreset::equidistant});
}

// u(1) - u(2) <= (eps / 2) (u(2) - u(3))
UtilitySet UtilitySet::eps_indiff(int m, const Rational& epsilon) {
    if (m < 3) throw DomainError("EPS_INDIFF preset needs m >= 3");
    if (sgn(epsilon) <= 0) throw DomainError("EPS_INDIFF needs epsilon > 0");
    Rational half = epsilon / 2;
    std::vector<Rational> c(m);
    c[0] = 1;
    c[1] = -1 - half;
    c[2] = half;
    return polytope(m, {RankConstraint{c, UtilityRelation::le}},
                    PresetTag{UtilityPreset::eps_indiff, 0, epsilon});
}

bool UtilitySet::contains(const UtilityVector& u) const {
    if (u.size() != m_) return false;
    switch (kind_) {
        case Kind::finite:
            return std::find(vectors_.begin(), vectors_.end(), u) != vectors_.end();
        case Kind::polytope:
            for (const auto& c : constraints_) {
                if (!constraint_holds(c, u.values())) return false;
            }
            return true;
        case Kind::vertices: {
            // u in conv(vertices) (up to u(1)=1, u(m)=0 scaling is not applied here).
            lp::LinearProgram prog;
            std::vector<std::size_t> w;
            for (std::size_t i = 0; i < vectors_.size(); ++i) w.push_back(prog.add_variable());
            std::vector<lp::Term> sum;
            for (auto v : w) sum.push_back({v, 1});
            prog.add(sum, lp::Relation::eq, 1);
            for (int r = 0; r < m_; ++r) {
                std::vector<lp::Term> terms;
                for (std::size_t i = 0; i < vectors_.size(); ++i) terms.push_back({w[i], vectors_[i].values()[r]});
                prog.add(std::move(terms), lp::Relation::eq, u.values()[r]);
            }
            return lp::is_optimal(lp::check_feasible(prog));
        }
    }
    return false;
}

std::vector<UtilityVector> UtilitySet::vertices() const {
    if (kind_ != Kind::polytope) return vectors_;
    // Coordinates u(2..m-1); u(1)=1 and u(m)=0. Constraints: the monotone
    // chain u(r) >= u(r+1) plus the set's own rows. Every vertex makes m-2
    // independent rows tight, so enumerate those subsets.
    const int dim = m_ - 2;
    if (dim == 0) {
        std::vector<Rational> u{1, 0};
        return {UtilityVector(u)};
    }
    struct Row {
        std::vector<Rational> a;  // over u(2..m-1)
        Rational b;               // a.x (rel) b
        bool equality;
        bool ge;
    };
    auto project = [&](const std::vector<Rational>& coeffs, UtilityRelation rel) {
        // sum coeffs[r] u(r) (rel) 0  with u(1)=1, u(m)=0
        Row row;
        row.a.assign(coeffs.begin() + 1, coeffs.begin() + 1 + dim);
        row.b = -coeffs[0];
        row.equality = rel == UtilityRelation::eq;
        row.ge = rel != UtilityRelation::le;
        return row;
    };
    std::vector<Row> rows;
    for (int r = 0; r + 1 < m_; ++r) {
        std::vector<Rational> c(m_);
        c[r] = 1;
        c[r + 1] = -1;
        rows.push_back(project(c, UtilityRelation::ge));
    }
    for (const auto& c : constraints_) rows.push_back(project(c.coeffs, c.rel));

    auto feasible = [&](const std::vector<Rational>& x) {
        for (const auto& row : rows) {
            Rational v = dot(row.a, x);
            if (row.equality ? v != row.b : (row.ge ? v < row.b : v > row.b)) return false;
        }
        return true;
    };

    std::set<std::vector<Rational>> found;
    const std::size_t k = rows.size();
    std::vector<bool> pick(k, false);
    std::fill(pick.begin(), pick.begin() + dim, true);
    do {
        std::vector<std::vector<Rational>> a;
        std::vector<Rational> b;
        bool has_all_equalities = true;
        for (std::size_t i = 0; i < k; ++i) {
            if (pick[i]) {
                a.push_back(rows[i].a);
                b.push_back(rows[i].b);
            } else if (rows[i].equality) {
                has_all_equalities = false;
            }
        }
        (void)has_all_equalities;  // feasibility check enforces equalities
        auto x = solve_square(a, b);
        if (x && feasible(*x)) found.insert(*x);
    } while (std::prev_permutation(pick.begin(), pick.end()));

    std::vector<UtilityVector> out;
    for (const auto& x : found) {
        std::vector<Rational> u{1};
        u.insert(u.end(), x.begin(), x.end());
        u.push_back(0);
        out.push_back(UtilityVector::closure_point(u));
    }
    return out;
}

UtilitySet UtilitySet::as_vertex_list() const {
    if (kind_ == Kind::finite) return vertex_list(vectors_);
    if (kind_ == Kind::vertices) return *this;
    UtilitySet set = vertex_list(vertices());
    set.preset_ = preset_;
    return set;
}

// --- profile algebra -------------------------------------------------------------

int rank(const PreferenceRelation& pref, Alternative x) {
    return pref.rank(x);
}

int majority_margin(const Profile& profile, Alternative x, Alternative y) {
    const int m = profile.alternatives();
    if (x < 0 || x >= m || y < 0 || y >= m) throw DomainError("alternative out of range");
    if (x == y) throw DomainError("majority margin needs two distinct alternatives");
    int margin = 0;
    for (const auto& p : profile.preferences()) margin += p.prefers(x, y) ? 1 : -1;
    return margin;
}

std::optional<Alternative> condorcet_winner(const Profile& profile) {
    const int m = profile.alternatives();
    for (Alternative x = 0; x < m; ++x) {
        bool wins = true;
        for (Alternative y = 0; y < m && wins; ++y) {
            if (y != x && majority_margin(profile, x, y) <= 0) wins = false;
        }
        if (wins) return x;
    }
    return std::nullopt;
}

std::set<Alternative> pareto_optimal_set(const Profile& profile) {
    const int m = profile.alternatives();
    std::set<Alternative> out;
    for (Alternative x = 0; x < m; ++x) {
        bool dominated = false;
        for (Alternative y = 0; y < m && !dominated; ++y) {
            if (y == x) continue;
            dominated = std::all_of(profile.preferences().begin(), profile.preferences().end(),
                                    [&](const PreferenceRelation& p) { return p.prefers(y, x); });
        }
        if (!dominated) out.insert(x);
    }
    return out;
}

namespace {

void check_permutation(const std::vector<int>& perm, int size, const char* what) {
    if (static_cast<int>(perm.size()) != size) throw DomainError(std::string(what) + " permutation has wrong length");
    std::vector<bool> seen(size, false);
    for (int v : perm) {
        if (v < 0 || v >= size || seen[v]) throw DomainError(std::string(what) + " map is not a bijection");
        seen[v] = true;
    }
}

}  // namespace

Profile permute_voters(const Profile& profile, const std::vector<int>& perm) {
    check_permutation(perm, profile.voters(), "voter");
    std::vector<PreferenceRelation> prefs(profile.voters());
    for (int i = 0; i < profile.voters(); ++i) prefs[perm[i]] = profile[i];
    return Profile(profile.alternatives(), std::move(prefs));
}

PreferenceRelation permute_alternatives(const PreferenceRelation& pref, const std::vector<Alternative>& perm) {
    check_permutation(perm, pref.size(), "alternative");
    std::vector<Alternative> order(pref.size());
    for (int pos = 0; pos < pref.size(); ++pos) order[pos] = perm[pref.at(pos)];
    return PreferenceRelation(order);
}

Profile permute_alternatives(const Profile& profile, const std::vector<Alternative>& perm) {
    check_permutation(perm, profile.alternatives(), "alternative");
    std::vector<PreferenceRelation> prefs;
    prefs.reserve(profile.voters());
    for (const auto& p : profile.preferences()) prefs.push_back(permute_alternatives(p, perm));
    return Profile(profile.alternatives(), std::move(prefs));
}

RankMatrix rank_matrix(const Profile& profile) {
    RankMatrix out;
    out.rows.assign(profile.alternatives(), {});
    for (Alternative x = 0; x < profile.alternatives(); ++x) {
        auto& row = out.rows[x];
        row.reserve(profile.voters());
        for (const auto& p : profile.preferences()) row.push_back(p.rank(x));
        std::sort(row.begin(), row.end());
    }
    return out;
}

Rational expected_utility(const Lottery& p, const UtilityVector& u, const PreferenceRelation& pref) {
    if (p.size() != u.size() || p.size() != pref.size()) throw DomainError("dimension mismatch in expected utility");
    Rational total;
    for (Alternative x = 0; x < p.size(); ++x) {
        if (sgn(p[x]) != 0) total += p[x] * u(pref.rank(x));
    }
    return total;
}

// --- profile text format -----------------------------------------------------------

std::vector<std::string> default_names(int m) {
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i) {
        names.push_back(m <= 26 ? std::string(1, static_cast<char>('a' + i)) : "x" + std::to_string(i));
    }
    return names;
}

namespace {

std::string strip(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

PreferenceRelation parse_preference(std::string_view text, const std::vector<std::string>& names) {
    std::vector<Alternative> order;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('>', start);
        if (end == std::string_view::npos) end = text.size();
        std::string name = strip(text.substr(start, end - start));
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw DomainError("unknown alternative '" + name + "'");
        order.push_back(static_cast<Alternative>(it - names.begin()));
        start = end + 1;
    }
    if (order.size() != names.size()) throw DomainError("preference must rank every alternative");
    return PreferenceRelation(order);
}

ProfileDocument parse_profile(std::string_view text) {
    std::vector<std::string> names;
    std::vector<PreferenceRelation> prefs;
    bool have_header = false;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = strip(line);
        if (s.empty() || s.front() == '#') continue;
        auto colon = s.find(':');
        if (colon == std::string::npos) {
            throw DomainError("line " + std::to_string(line_no) + ": expected '<key>: ...'");
        }
        std::string key = strip(std::string_view(s).substr(0, colon));
        std::string rest = strip(std::string_view(s).substr(colon + 1));
        if (!have_header) {
            if (key != "alternatives") throw DomainError("first line must be 'alternatives: ...'");
            std::istringstream words(rest);
            std::string w;
            while (words >> w) {
                if (std::find(names.begin(), names.end(), w) != names.end()) {
                    throw DomainError("duplicate alternative name '" + w + "'");
                }
                names.push_back(w);
            }
            if (names.empty()) throw DomainError("no alternatives declared");
            have_header = true;
            continue;
        }
        long count = 0;
        try {
            std::size_t used = 0;
            count = std::stol(key, &used);
            if (used != key.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DomainError("line " + std::to_string(line_no) + ": voter count expected");
        }
        if (count < 1) throw DomainError("line " + std::to_string(line_no) + ": count must be positive");
        auto pref = parse_preference(rest, names);
        for (long c = 0; c < count; ++c) prefs.push_back(pref);
    }
    if (!have_header) throw DomainError("missing 'alternatives:' header");
    const int m = static_cast<int>(names.size());
    return ProfileDocument{std::move(names), Profile(m, std::move(prefs))};
}

std::string format_profile(const Profile& profile, const std::vector<std::string>& names) {
    std::string out = "alternatives:";
    for (const auto& n : names) out += " " + n;
    out += "\n";
    const auto& prefs = profile.preferences();
    for (std::size_t i = 0; i < prefs.size();) {
        std::size_t j = i;
        while (j < prefs.size() && prefs[j] == prefs[i]) ++j;
        out += std::to_string(j - i) + ": " + prefs[i].to_string(&names) + "\n";
        i = j;
    }
    return out;
}

}  // namespace sds

namespace sds {

std::uint64_t profile_count(int m, int n) {
    std::uint64_t per = PreferenceRelation::all(m).size();
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) {
        if (total > std::numeric_limits<std::uint64_t>::max() / per) return std::numeric_limits<std::uint64_t>::max();
        total *= per;
    }
    return total;
}

void for_each_profile(int m, int n, const std::function<bool(const Profile&)>& visit) {
    if (n < 1) throw DomainError("a profile needs at least one voter");
    const auto& all = PreferenceRelation::all(m);
    std::vector<std::size_t> idx(n, 0);
    std::vector<PreferenceRelation> prefs(n, all[0]);
    while (true) {
        if (!visit(Profile(m, prefs))) return;
        int v = n - 1;
        while (v >= 0 && ++idx[v] == all.size()) {
            idx[v] = 0;
            prefs[v] = all[0];
            --v;
        }
        if (v < 0) return;
        prefs[v] = all[idx[v]];
    }
}

void for_each_multiset(int kinds, int n, const std::function<bool(const std::vector<int>&)>& visit) {
    if (n < 0 || kinds < 1) throw DomainError("invalid multiset enumeration");
    std::vector<int> cur(n, 0);
    while (true) {
        if (!visit(cur)) return;
        int v = n - 1;
        while (v >= 0 && cur[v] == kinds - 1) --v;
        if (v < 0) return;
        ++cur[v];
        for (int w = v + 1; w < n; ++w) cur[w] = cur[v];
    }
}

}  // namespace sds
