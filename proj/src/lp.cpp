#include "sds/lp.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sds::lp {

std::size_t LinearProgram::add_variable(std::optional<Rational> lo, std::optional<Rational> hi) {
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
    return variables++;
}

void LinearProgram::add(std::vector<Term> terms, Relation rel, Rational rhs) {
    constraints.push_back(Constraint{std::move(terms), rel, std::move(rhs)});
}

namespace {

bool is_zero(const Rational& q) { return sgn(q) == 0; }

void validate(const LinearProgram& lp) {
    if (lp.lower.size() != lp.variables || lp.upper.size() != lp.variables) {
        throw DomainError("bound vectors must have one entry per variable");
    }
    auto check_terms = [&](const std::vector<Term>& terms) {
        for (const auto& t : terms) {
            if (t.var >= lp.variables) throw DomainError("term references variable out of range");
        }
    };
    check_terms(lp.objective);
    for (const auto& c : lp.constraints) check_terms(c.terms);
}

// Merges duplicate variables and drops zero coefficients.
std::vector<Term> normalise(const std::vector<Term>& terms) {
    std::map<std::size_t, Rational> acc;
    for (const auto& t : terms) acc[t.var] += t.coeff;
    std::vector<Term> out;
    for (auto& [v, c] : acc) {
        if (!is_zero(c)) out.push_back(Term{v, c});
    }
    return out;
}

bool relation_holds(const Rational& lhs, Relation rel, const Rational& rhs) {
    switch (rel) {
        case Relation::le: return lhs <= rhs;
        case Relation::eq: return lhs == rhs;
        case Relation::ge: return lhs >= rhs;
    }
    return false;
}

Relation flip(Relation rel) {
    if (rel == Relation::le) return Relation::ge;
    if (rel == Relation::ge) return Relation::le;
    return rel;
}

// ---------------------------------------------------------------------------
// Presolve: repeatedly fixes variables pinned by singleton equalities or by
// equal bounds, and evaluates rows that lose all their free variables.

struct Presolve {
    std::vector<std::optional<Rational>> fixed;
    // Fixing order; row index or npos when the bounds coincide.
    std::vector<std::pair<std::size_t, std::size_t>> fix_log;  // (var, row)
    std::vector<bool> row_active;
    std::vector<std::vector<Term>> rows;  // normalised terms of every row
    std::optional<FarkasCertificate> conflict;
};

constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();

// Extends a certificate over the reduced system to the fixing rows.
void back_substitute(const LinearProgram& lp, const Presolve& pre, FarkasCertificate& cert) {
    std::vector<Rational> residual(lp.variables);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        if (is_zero(cert.rows[i])) continue;
        for (const auto& t : pre.rows[i]) residual[t.var] += cert.rows[i] * t.coeff;
    }
    for (std::size_t j = 0; j < lp.variables; ++j) residual[j] += cert.lower[j] + cert.upper[j];

    for (auto it = pre.fix_log.rbegin(); it != pre.fix_log.rend(); ++it) {
        auto [var, row] = *it;
        const Rational s = residual[var];
        if (is_zero(s)) continue;
        if (row == kNoRow) {
            if (s <= 0) cert.lower[var] -= s;
            else cert.upper[var] -= s;
            residual[var] = 0;
            continue;
        }
        Rational a;
        for (const auto& t : pre.rows[row]) {
            if (t.var == var) a = t.coeff;
        }
        Rational mult = -s / a;
        cert.rows[row] += mult;
        for (const auto& t : pre.rows[row]) residual[t.var] += mult * t.coeff;
    }
}

Presolve presolve(const LinearProgram& lp) {
    Presolve pre;
    pre.fixed.assign(lp.variables, std::nullopt);
    pre.row_active.assign(lp.constraints.size(), true);
    pre.rows.reserve(lp.constraints.size());
    for (const auto& c : lp.constraints) pre.rows.push_back(normalise(c.terms));

    auto fail = [&](FarkasCertificate cert) {
        back_substitute(lp, pre, cert);
        pre.conflict = std::move(cert);
    };
    auto empty_cert = [&] {
        FarkasCertificate cert;
        cert.rows.assign(lp.constraints.size(), Rational(0));
        cert.lower.assign(lp.variables, Rational(0));
        cert.upper.assign(lp.variables, Rational(0));
        return cert;
    };
    auto check_bounds = [&](std::size_t var) -> bool {
        const Rational& v = *pre.fixed[var];
        if (lp.lower[var] && v < *lp.lower[var]) {
            auto cert = empty_cert();
            cert.lower[var] = 1;
            fail(std::move(cert));
            return false;
        }
        if (lp.upper[var] && v > *lp.upper[var]) {
            auto cert = empty_cert();
            cert.upper[var] = -1;
            fail(std::move(cert));
            return false;
        }
        return true;
    };

    for (std::size_t j = 0; j < lp.variables; ++j) {
        if (lp.lower[j] && lp.upper[j]) {
            if (*lp.lower[j] > *lp.upper[j]) {
                auto cert = empty_cert();
                cert.lower[j] = 1;
                cert.upper[j] = -1;
                pre.conflict = std::move(cert);
                return pre;
            }
            if (*lp.lower[j] == *lp.upper[j]) {
                pre.fixed[j] = *lp.lower[j];
                pre.fix_log.emplace_back(j, kNoRow);
            }
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
            if (!pre.row_active[i]) continue;
            const auto& c = lp.constraints[i];
            Rational rhs = c.rhs;
            const Term* single = nullptr;
            std::size_t free_count = 0;
            for (const auto& t : pre.rows[i]) {
                if (pre.fixed[t.var]) {
                    rhs -= t.coeff * *pre.fixed[t.var];
                } else {
                    ++free_count;
                    single = &t;
                }
            }
            if (free_count == 0) {
                pre.row_active[i] = false;
                changed = true;
                if (!relation_holds(Rational(0), c.rel, rhs)) {
                    auto cert = empty_cert();
                    cert.rows[i] = c.rel == Relation::le ? -1 : (c.rel == Relation::ge ? 1 : sgn(rhs));
                    fail(std::move(cert));
                    return pre;
                }
            } else if (free_count == 1 && c.rel == Relation::eq) {
                pre.fixed[single->var] = rhs / single->coeff;
                pre.fix_log.emplace_back(single->var, i);
                pre.row_active[i] = false;
                changed = true;
                if (!check_bounds(single->var)) return pre;
            }
        }
    }
    return pre;
}

// ---------------------------------------------------------------------------
// Dictionary simplex over x >= 0 columns.

enum class VarKind { structural, slack, surplus, artificial };

struct Tableau {
    std::size_t rows = 0;
    std::vector<std::vector<Rational>> d;  // rows x nonbasic columns
    std::vector<Rational> beta;
    // Infinitesimal perturbation of beta; (beta, eps) stays lexicographically nonnegative.
    std::vector<Rational> eps;
    std::vector<Rational> obj;             // reduced costs (entering if negative)
    Rational obj_value;
    std::vector<std::size_t> basic;        // variable id per row
    std::vector<std::size_t> nonbasic;     // variable id per column
    std::vector<VarKind> kind;             // per variable id
    std::vector<bool> blocked;             // per column
    std::size_t pivots = 0;

    void pivot(std::size_t r, std::size_t s) {
        ++pivots;
        auto& row = d[r];
        Rational inv = 1 / row[s];
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j == s) continue;
            if (!is_zero(row[j])) {
                row[j] *= inv;
                nz.push_back(j);
            }
        }
        row[s] = inv;
        beta[r] *= inv;
        eps[r] *= inv;

        Rational tmp;
        auto eliminate = [&](std::vector<Rational>& target, Rational& rhs, Rational* rhs_eps) {
            if (is_zero(target[s])) return;
            Rational f = target[s];
            for (std::size_t j : nz) {
                mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), row[j].get_mpq_t());
                mpq_sub(target[j].get_mpq_t(), target[j].get_mpq_t(), tmp.get_mpq_t());
            }
            target[s] = -f * inv;
            mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), beta[r].get_mpq_t());
            mpq_sub(rhs.get_mpq_t(), rhs.get_mpq_t(), tmp.get_mpq_t());
            if (rhs_eps) {
                mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), eps[r].get_mpq_t());
                mpq_sub(rhs_eps->get_mpq_t(), rhs_eps->get_mpq_t(), tmp.get_mpq_t());
            }
        };
        for (std::size_t i = 0; i < rows; ++i) {
            if (i != r) eliminate(d[i], beta[i], &eps[i]);
        }
        eliminate(obj, obj_value, nullptr);
        std::swap(basic[r], nonbasic[s]);
    }

    // Objective row for costs c (per variable id), maximising.
    void set_objective(const std::vector<Rational>& cost) {
        obj.assign(nonbasic.size(), Rational(0));
        obj_value = 0;
        for (std::size_t j = 0; j < nonbasic.size(); ++j) obj[j] = -cost[nonbasic[j]];
        for (std::size_t i = 0; i < rows; ++i) {
            const Rational& cb = cost[basic[i]];
            if (is_zero(cb)) continue;
            for (std::size_t j = 0; j < nonbasic.size(); ++j) {
                if (!is_zero(d[i][j])) obj[j] += cb * d[i][j];
            }
            obj_value += cb * beta[i];
        }
    }

    enum class Result { optimal, unbounded };

    // Dantzig pricing with a lexicographic ratio test on (beta, eps). eps is
    // redrawn as a fixed-seed positive vector on entry, which perturbs the
    // current right-hand side so that no pivot is degenerate in the
    // lexicographic order. Exact ties fall back to Bland's rule.
    // Stops early once the objective reaches `ceiling`, a known upper bound.
    Result optimise(std::size_t* unbounded_column, const Rational* ceiling = nullptr) {
        std::mt19937_64 rng(0x5eed);
        std::uniform_int_distribution<long> draw(1, 1L << 30);
        eps.resize(rows);
        for (auto& e : eps) e = Rational(draw(rng), 1L << 30);
        bool bland = false;
        Rational lhs;
        Rational rhs;
        for (;;) {
            if (ceiling && obj_value == *ceiling) return Result::optimal;
            std::size_t s = nonbasic.size();
            for (std::size_t j = 0; j < nonbasic.size(); ++j) {
                if (blocked[j] || sgn(obj[j]) >= 0) continue;
                if (s == nonbasic.size()) {
                    s = j;
                } else if (bland ? nonbasic[j] < nonbasic[s] : obj[j] < obj[s]) {
                    s = j;
                }
            }
            if (s == nonbasic.size()) return Result::optimal;

            // Lexicographic minimum of (beta_i, eps_i) / d_is over d_is > 0.
            std::size_t r = rows;
            bool tie = false;
            for (std::size_t i = 0; i < rows; ++i) {
                if (sgn(d[i][s]) <= 0) continue;
                if (r == rows) {
                    r = i;
                    continue;
                }
                lhs = beta[i] * d[r][s];
                rhs = beta[r] * d[i][s];
                int c = cmp(lhs, rhs);
                if (c == 0) {
                    lhs = eps[i] * d[r][s];
                    rhs = eps[r] * d[i][s];
                    c = cmp(lhs, rhs);
                }
                if (c < 0) {
                    r = i;
                    tie = false;
                } else if (c == 0) {
                    tie = true;
                    if (basic[i] < basic[r]) r = i;
                }
            }
            if (r == rows) {
                *unbounded_column = s;
                return Result::unbounded;
            }
            if (tie) bland = true;
            pivot(r, s);
        }
    }

    void drop_row(std::size_t r) {
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(r));
        beta.erase(beta.begin() + static_cast<std::ptrdiff_t>(r));
        eps.erase(eps.begin() + static_cast<std::ptrdiff_t>(r));
        basic.erase(basic.begin() + static_cast<std::ptrdiff_t>(r));
        --rows;
    }
};

// Column j of the standard form is either x_v - lower_v or one half of a
// split free variable.
struct Column {
    std::size_t var;  // reduced variable index
    int sign;         // +1 or -1
};

struct StandardRow {
    std::vector<std::pair<std::size_t, Rational>> coeffs;  // by column
    Relation rel;
    Rational rhs;
    bool negated = false;
    std::size_t source;              // original constraint index, or kNoRow for an upper bound
    std::size_t bound_var = kNoRow;  // original variable for upper-bound rows
};

using SparseRow = std::vector<std::pair<std::size_t, Rational>>;

// The reduced program after presolve in the form
//   sum a_ic x_c (+ slack | - surplus) (+ artificial) = rhs >= 0,  x >= 0.
// Variable ids: structural columns, slacks and surpluses, then artificials.
struct Standard {
    const LinearProgram* lp = nullptr;
    Presolve pre;
    std::vector<std::size_t> free_vars;  // reduced index -> original variable
    std::vector<Column> columns;
    std::vector<StandardRow> rows;
    std::vector<VarKind> kind;
    std::vector<std::size_t> var_row;          // row of each logical variable
    std::vector<std::size_t> row_entry_var;    // initial basic variable per row
    std::vector<std::size_t> initial_nonbasic;
    std::vector<SparseRow> column_entries;     // structural column -> (row, coeff)
    bool any_artificial = false;

    std::size_t structural() const { return columns.size(); }
    static int sign(VarKind k) { return k == VarKind::surplus ? -1 : 1; }
};

Standard make_standard(const LinearProgram& lp) {
    Standard st;
    st.lp = &lp;
    st.pre = presolve(lp);
    if (st.pre.conflict) return st;

    std::vector<std::size_t> reduced_index(lp.variables, kNoRow);
    for (std::size_t j = 0; j < lp.variables; ++j) {
        if (!st.pre.fixed[j]) {
            reduced_index[j] = st.free_vars.size();
            st.free_vars.push_back(j);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> var_columns(st.free_vars.size(), {kNoRow, kNoRow});
    for (std::size_t r = 0; r < st.free_vars.size(); ++r) {
        std::size_t v = st.free_vars[r];
        var_columns[r].first = st.columns.size();
        st.columns.push_back(Column{r, +1});
        if (!lp.lower[v]) {
            var_columns[r].second = st.columns.size();
            st.columns.push_back(Column{r, -1});
        }
    }
    auto shift_of = [&](std::size_t v) -> Rational { return lp.lower[v] ? *lp.lower[v] : Rational(0); };

    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        if (!st.pre.row_active[i]) continue;
        StandardRow row;
        row.rel = lp.constraints[i].rel;
        row.rhs = lp.constraints[i].rhs;
        row.source = i;
        for (const auto& t : st.pre.rows[i]) {
            if (st.pre.fixed[t.var]) {
                row.rhs -= t.coeff * *st.pre.fixed[t.var];
                continue;
            }
            row.rhs -= t.coeff * shift_of(t.var);
            auto [pos, neg] = var_columns[reduced_index[t.var]];
            row.coeffs.emplace_back(pos, t.coeff);
            if (neg != kNoRow) row.coeffs.emplace_back(neg, -t.coeff);
        }
        st.rows.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < st.free_vars.size(); ++r) {
        std::size_t v = st.free_vars[r];
        if (!lp.upper[v]) continue;
        StandardRow row;
        row.rel = Relation::le;
        row.rhs = *lp.upper[v] - shift_of(v);
        row.source = kNoRow;
        row.bound_var = v;
        auto [pos, neg] = var_columns[r];
        row.coeffs.emplace_back(pos, Rational(1));
        if (neg != kNoRow) row.coeffs.emplace_back(neg, Rational(-1));
        st.rows.push_back(std::move(row));
    }
    // Homogeneous >= rows are flipped so that their slack can start basic.
    for (auto& row : st.rows) {
        if (sgn(row.rhs) < 0 || (sgn(row.rhs) == 0 && row.rel == Relation::ge)) {
            row.negated = true;
            row.rhs = -row.rhs;
            row.rel = flip(row.rel);
            for (auto& [c, a] : row.coeffs) a = -a;
        }
    }

    const std::size_t n_struct = st.columns.size();
    const std::size_t rows = st.rows.size();
    st.kind.assign(n_struct, VarKind::structural);
    st.var_row.assign(n_struct, kNoRow);
    st.row_entry_var.assign(rows, kNoRow);
    st.initial_nonbasic.resize(n_struct);
    for (std::size_t j = 0; j < n_struct; ++j) st.initial_nonbasic[j] = j;
    for (std::size_t i = 0; i < rows; ++i) {
        const auto rel = st.rows[i].rel;
        if (rel == Relation::eq) continue;
        if (rel == Relation::le) st.row_entry_var[i] = st.kind.size();
        else st.initial_nonbasic.push_back(st.kind.size());
        st.kind.push_back(rel == Relation::le ? VarKind::slack : VarKind::surplus);
        st.var_row.push_back(i);
    }
    for (std::size_t i = 0; i < rows; ++i) {
        if (st.rows[i].rel == Relation::le) continue;
        st.row_entry_var[i] = st.kind.size();
        st.kind.push_back(VarKind::artificial);
        st.var_row.push_back(i);
        st.any_artificial = true;
    }
    st.column_entries.assign(n_struct, {});
    for (std::size_t i = 0; i < rows; ++i) {
        for (const auto& [c, a] : st.rows[i].coeffs) st.column_entries[c].emplace_back(i, a);
    }
    return st;
}

// Multipliers y per standard row (the duals of the phase-1 program) mapped
// back to a certificate over the original program.
FarkasCertificate certificate_from_duals(const Standard& st, const std::vector<Rational>& y) {
    const LinearProgram& lp = *st.lp;
    FarkasCertificate cert;
    cert.rows.assign(lp.constraints.size(), Rational(0));
    cert.lower.assign(lp.variables, Rational(0));
    cert.upper.assign(lp.variables, Rational(0));
    std::vector<Rational> col_residual(st.structural());
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
        const auto& row = st.rows[i];
        Rational lambda = -y[i];
        for (const auto& [c, a] : row.coeffs) col_residual[c] += lambda * a;
        if (row.negated) lambda = -lambda;
        if (row.source != kNoRow) cert.rows[row.source] = lambda;
        else cert.upper[row.bound_var] = lambda;
    }
    for (std::size_t c = 0; c < st.structural(); ++c) {
        const auto& col = st.columns[c];
        if (col.sign < 0) continue;
        std::size_t v = st.free_vars[col.var];
        if (lp.lower[v]) cert.lower[v] = -col_residual[c];
    }
    back_substitute(lp, st.pre, cert);
    return cert;
}

// ---------------------------------------------------------------------------
// Exact path: phase 1 on the rational tableau.

struct ExactPhase {
    bool feasible = false;
    Tableau tab;
    std::optional<FarkasCertificate> certificate;
};

ExactPhase exact_phase_one(const Standard& st) {
    ExactPhase out;
    Tableau& tab = out.tab;
    const std::size_t rows = st.rows.size();
    tab.rows = rows;
    tab.kind = st.kind;
    tab.basic = st.row_entry_var;
    tab.nonbasic = st.initial_nonbasic;
    tab.blocked.assign(tab.nonbasic.size(), false);
    std::vector<std::size_t> column_of(st.kind.size(), kNoRow);
    for (std::size_t j = 0; j < tab.nonbasic.size(); ++j) column_of[tab.nonbasic[j]] = j;
    tab.d.assign(rows, std::vector<Rational>(tab.nonbasic.size()));
    tab.beta.resize(rows);
    tab.eps.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (const auto& [c, a] : st.rows[i].coeffs) tab.d[i][c] += a;
        tab.beta[i] = st.rows[i].rhs;
    }
    for (std::size_t v = st.structural(); v < st.kind.size(); ++v) {
        if (st.kind[v] == VarKind::surplus) tab.d[st.var_row[v]][column_of[v]] = -1;
    }
    if (!st.any_artificial) {
        out.feasible = true;
        return out;
    }

    // Phase 1: maximise -sum(artificials).
    std::vector<Rational> cost(st.kind.size());
    for (std::size_t v = 0; v < st.kind.size(); ++v) {
        if (st.kind[v] == VarKind::artificial) cost[v] = -1;
    }
    tab.set_objective(cost);
    std::size_t ub = 0;
    const Rational zero;
    tab.optimise(&ub, &zero);
    if (sgn(tab.obj_value) < 0) {
        std::vector<Rational> y(rows);
        std::fill(column_of.begin(), column_of.end(), kNoRow);
        for (std::size_t j = 0; j < tab.nonbasic.size(); ++j) column_of[tab.nonbasic[j]] = j;
        for (std::size_t i = 0; i < rows; ++i) {
            std::size_t v = st.row_entry_var[i];
            y[i] = column_of[v] == kNoRow ? cost[v] : tab.obj[column_of[v]] + cost[v];
        }
        out.certificate = certificate_from_duals(st, y);
        return out;
    }
    // Drive zero-level artificials out of the basis or drop their rows.
    for (std::size_t i = 0; i < tab.rows;) {
        if (tab.kind[tab.basic[i]] != VarKind::artificial) {
            ++i;
            continue;
        }
        std::size_t s = tab.nonbasic.size();
        for (std::size_t j = 0; j < tab.nonbasic.size(); ++j) {
            if (tab.kind[tab.nonbasic[j]] != VarKind::artificial && !is_zero(tab.d[i][j])) {
                s = j;
                break;
            }
        }
        if (s == tab.nonbasic.size()) {
            tab.drop_row(i);
            continue;
        }
        tab.pivot(i, s);
        ++i;
    }
    for (std::size_t j = 0; j < tab.nonbasic.size(); ++j) {
        if (tab.kind[tab.nonbasic[j]] == VarKind::artificial) tab.blocked[j] = true;
    }
    out.feasible = true;
    return out;
}

// ---------------------------------------------------------------------------
// Floating-point simplex. It only proposes bases; every claim it makes is
// re-derived exactly from the basis before use.

constexpr double kPivotTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kFeasTol = 1e-9;

struct FloatTableau {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> d;  // row-major
    std::vector<double> beta;
    std::vector<double> obj;
    double obj_value = 0;
    std::vector<std::size_t> basic;
    std::vector<std::size_t> nonbasic;
    std::vector<bool> blocked;
    const std::vector<VarKind>* kind = nullptr;
    // Basic artificials may not leave zero (phase 2).
    bool pin_artificials = false;
    std::size_t pivots = 0;

    double* row(std::size_t i) { return d.data() + i * cols; }

    void pivot(std::size_t r, std::size_t s) {
        ++pivots;
        double* pr = row(r);
        const double inv = 1.0 / pr[s];
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < cols; ++j) {
            if (j == s || pr[j] == 0.0) continue;
            pr[j] *= inv;
            nz.push_back(j);
        }
        pr[s] = inv;
        beta[r] *= inv;
        auto eliminate = [&](double* target, double& rhs) {
            const double f = target[s];
            if (f == 0.0) return;
            for (std::size_t j : nz) {
                double v = target[j] - f * pr[j];
                target[j] = std::abs(v) < 1e-14 ? 0.0 : v;
            }
            target[s] = -f * inv;
            rhs -= f * beta[r];
        };
        for (std::size_t i = 0; i < rows; ++i) {
            if (i != r) eliminate(row(i), beta[i]);
        }
        eliminate(obj.data(), obj_value);
        std::swap(basic[r], nonbasic[s]);
    }

    void set_objective(const std::vector<double>& cost) {
        obj.assign(cols, 0.0);
        obj_value = 0;
        for (std::size_t j = 0; j < cols; ++j) obj[j] = -cost[nonbasic[j]];
        for (std::size_t i = 0; i < rows; ++i) {
            const double cb = cost[basic[i]];
            if (cb == 0.0) continue;
            const double* ri = row(i);
            for (std::size_t j = 0; j < cols; ++j) obj[j] += cb * ri[j];
            obj_value += cb * beta[i];
        }
    }

    enum class Result { optimal, unbounded, stalled };

    Result optimise(std::size_t* unbounded_column, std::optional<double> ceiling = std::nullopt) {
        const std::size_t limit = 50 * (rows + cols) + 1000;
        for (std::size_t iter = 0; iter < limit; ++iter) {
            if (ceiling && obj_value >= *ceiling) return Result::optimal;
            std::size_t s = cols;
            for (std::size_t j = 0; j < cols; ++j) {
                if (blocked[j] || obj[j] >= -kOptTol) continue;
                if (s == cols || obj[j] < obj[s]) s = j;
            }
            if (s == cols) return Result::optimal;

            // Harris ratio test: bound the step with tolerance, then take the
            // largest pivot among rows within that bound.
            auto entry = [&](std::size_t i) {
                double a = row(i)[s];
                if (pin_artificials && (*kind)[basic[i]] == VarKind::artificial) a = std::abs(a);
                return a;
            };
            double bound = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows; ++i) {
                double a = entry(i);
                if (a > kPivotTol) bound = std::min(bound, (std::max(beta[i], 0.0) + kFeasTol) / a);
            }
            if (bound == std::numeric_limits<double>::infinity()) {
                *unbounded_column = s;
                return Result::unbounded;
            }
            std::size_t r = rows;
            double best = 0;
            for (std::size_t i = 0; i < rows; ++i) {
                double a = entry(i);
                if (a > kPivotTol && std::max(beta[i], 0.0) / a <= bound && a > best) {
                    best = a;
                    r = i;
                }
            }
            pivot(r, s);
        }
        return Result::stalled;
    }
};

FloatTableau float_tableau(const Standard& st) {
    FloatTableau tab;
    tab.rows = st.rows.size();
    tab.kind = &st.kind;
    tab.basic = st.row_entry_var;
    tab.nonbasic = st.initial_nonbasic;
    tab.cols = tab.nonbasic.size();
    tab.blocked.assign(tab.cols, false);
    tab.d.assign(tab.rows * tab.cols, 0.0);
    tab.beta.resize(tab.rows);
    std::vector<std::size_t> column_of(st.kind.size(), kNoRow);
    for (std::size_t j = 0; j < tab.cols; ++j) column_of[tab.nonbasic[j]] = j;
    // Inequalities are relaxed by a small fixed-seed perturbation against degeneracy.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> jitter(1e-7, 2e-7);
    for (std::size_t i = 0; i < tab.rows; ++i) {
        const auto& row = st.rows[i];
        for (const auto& [c, a] : row.coeffs) tab.row(i)[c] += a.get_d();
        double rhs = row.rhs.get_d();
        double delta = jitter(rng) * (1.0 + std::abs(rhs));
        if (row.rel == Relation::le) rhs += delta;
        else if (row.rel == Relation::ge && rhs > 2 * delta) rhs -= delta;
        tab.beta[i] = rhs;
    }
    for (std::size_t v = st.structural(); v < st.kind.size(); ++v) {
        if (st.kind[v] == VarKind::surplus) tab.row(st.var_row[v])[column_of[v]] = -1.0;
    }
    return tab;
}

// ---------------------------------------------------------------------------
// Exact evaluation of a basis.

// Solves M z = rhs for a square sparse M given by rows; nullopt when singular.
std::optional<std::vector<Rational>> sparse_solve(std::size_t k, std::vector<SparseRow> rows, std::vector<Rational> rhs) {
    std::vector<std::vector<std::size_t>> col_rows(k);
    std::vector<std::size_t> col_count(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (const auto& [c, a] : rows[i]) {
            col_rows[c].push_back(i);
            ++col_count[c];
        }
    }
    auto find = [](const SparseRow& row, std::size_t c) -> const Rational* {
        auto it = std::lower_bound(row.begin(), row.end(), c, [](const auto& e, std::size_t col) { return e.first < col; });
        return it != row.end() && it->first == c ? &it->second : nullptr;
    };
    std::vector<char> active(k, 1);
    std::vector<std::pair<std::size_t, std::size_t>> order;
    order.reserve(k);
    Rational f;
    for (std::size_t step = 0; step < k; ++step) {
        std::size_t p = k;
        for (std::size_t i = 0; i < k; ++i) {
            if (active[i] && (p == k || rows[i].size() < rows[p].size())) p = i;
        }
        if (rows[p].empty()) return std::nullopt;
        std::size_t c = rows[p].front().first;
        for (const auto& [j, a] : rows[p]) {
            if (col_count[j] < col_count[c]) c = j;
        }
        active[p] = 0;
        for (const auto& [j, a] : rows[p]) --col_count[j];
        const Rational pivot = *find(rows[p], c);
        for (std::size_t o : col_rows[c]) {
            if (!active[o]) continue;
            const Rational* a = find(rows[o], c);
            if (!a) continue;
            f = *a / pivot;
            SparseRow merged;
            merged.reserve(rows[o].size() + rows[p].size());
            auto x = rows[o].begin();
            auto y = rows[p].begin();
            while (x != rows[o].end() || y != rows[p].end()) {
                if (y == rows[p].end() || (x != rows[o].end() && x->first < y->first)) {
                    merged.push_back(std::move(*x++));
                } else if (x == rows[o].end() || y->first < x->first) {
                    merged.emplace_back(y->first, -f * y->second);
                    ++col_count[y->first];
                    col_rows[y->first].push_back(o);
                    ++y;
                } else {
                    Rational v = x->second - f * y->second;
                    if (is_zero(v)) --col_count[x->first];
                    else merged.emplace_back(x->first, std::move(v));
                    ++x;
                    ++y;
                }
            }
            rows[o] = std::move(merged);
            rhs[o] -= f * rhs[p];
        }
        order.emplace_back(p, c);
    }
    std::vector<Rational> z(k);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto [p, c] = *it;
        Rational acc = rhs[p];
        const Rational* pivot = nullptr;
        for (const auto& [j, a] : rows[p]) {
            if (j == c) pivot = &a;
            else acc -= a * z[j];
        }
        z[c] = acc / *pivot;
    }
    return z;
}

struct BasisSystem {
    std::vector<std::size_t> tight;           // rows without a basic logical
    std::vector<std::size_t> structural;      // basic structural columns
    std::vector<std::size_t> position;        // structural column -> index in `structural`
    std::vector<std::size_t> tight_position;  // row -> index in `tight`
    std::vector<std::size_t> row_logical;     // row -> its basic logical, if any
};

std::optional<BasisSystem> basis_system(const Standard& st, const std::vector<std::size_t>& basic) {
    BasisSystem bs;
    const std::size_t rows = st.rows.size();
    bs.row_logical.assign(rows, kNoRow);
    bs.position.assign(st.structural(), kNoRow);
    for (std::size_t v : basic) {
        if (st.kind[v] == VarKind::structural) {
            bs.position[v] = bs.structural.size();
            bs.structural.push_back(v);
        } else {
            std::size_t i = st.var_row[v];
            if (bs.row_logical[i] != kNoRow) return std::nullopt;
            bs.row_logical[i] = v;
        }
    }
    bs.tight_position.assign(rows, kNoRow);
    for (std::size_t i = 0; i < rows; ++i) {
        if (bs.row_logical[i] == kNoRow) {
            bs.tight_position[i] = bs.tight.size();
            bs.tight.push_back(i);
        }
    }
    if (bs.tight.size() != bs.structural.size()) return std::nullopt;
    return bs;
}

// z = B^{-1} v as values per variable id (zero off the basis).
std::optional<std::vector<Rational>> basis_solve(const Standard& st, const BasisSystem& bs, const std::vector<Rational>& v) {
    const std::size_t k = bs.structural.size();
    std::vector<SparseRow> m(k);
    std::vector<Rational> rhs(k);
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t i = bs.tight[t];
        for (const auto& [c, a] : st.rows[i].coeffs) {
            if (bs.position[c] != kNoRow) m[t].emplace_back(bs.position[c], a);
        }
        std::sort(m[t].begin(), m[t].end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        rhs[t] = v[i];
    }
    auto zs = sparse_solve(k, std::move(m), std::move(rhs));
    if (!zs) return std::nullopt;
    std::vector<Rational> z(st.kind.size());
    for (std::size_t p = 0; p < k; ++p) z[bs.structural[p]] = (*zs)[p];
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
        const std::size_t l = bs.row_logical[i];
        if (l == kNoRow) continue;
        Rational acc = v[i];
        for (const auto& [c, a] : st.rows[i].coeffs) {
            if (bs.position[c] != kNoRow) acc -= a * z[c];
        }
        z[l] = Standard::sign(st.kind[l]) * acc;
    }
    return z;
}

// y = c_B B^{-1}, one multiplier per row.
std::optional<std::vector<Rational>> basis_duals(const Standard& st, const BasisSystem& bs, const std::vector<Rational>& cost) {
    const std::size_t rows = st.rows.size();
    std::vector<Rational> y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t l = bs.row_logical[i];
        if (l != kNoRow) y[i] = Standard::sign(st.kind[l]) * cost[l];
    }
    const std::size_t k = bs.structural.size();
    std::vector<SparseRow> m(k);
    std::vector<Rational> rhs(k);
    for (std::size_t p = 0; p < k; ++p) {
        const std::size_t c = bs.structural[p];
        rhs[p] = cost[c];
        for (const auto& [i, a] : st.column_entries[c]) {
            if (bs.tight_position[i] != kNoRow) m[p].emplace_back(bs.tight_position[i], a);
            else rhs[p] -= a * y[i];
        }
        std::sort(m[p].begin(), m[p].end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    }
    auto ys = sparse_solve(k, std::move(m), std::move(rhs));
    if (!ys) return std::nullopt;
    for (std::size_t t = 0; t < k; ++t) y[bs.tight[t]] = (*ys)[t];
    return y;
}

std::vector<Rational> variable_column(const Standard& st, std::size_t v) {
    std::vector<Rational> col(st.rows.size());
    if (st.kind[v] == VarKind::structural) {
        for (const auto& [i, a] : st.column_entries[v]) col[i] = a;
    } else {
        col[st.var_row[v]] = Standard::sign(st.kind[v]);
    }
    return col;
}

// Reduced cost c_v - y.A_v.
Rational reduced_cost(const Standard& st, const std::vector<Rational>& y, const std::vector<Rational>& cost,
                      std::size_t v) {
    Rational r = cost[v];
    if (st.kind[v] == VarKind::structural) {
        for (const auto& [i, a] : st.column_entries[v]) r -= a * y[i];
    } else {
        r -= Standard::sign(st.kind[v]) * y[st.var_row[v]];
    }
    return r;
}

std::vector<Rational> row_rhs(const Standard& st) {
    std::vector<Rational> v(st.rows.size());
    for (std::size_t i = 0; i < st.rows.size(); ++i) v[i] = st.rows[i].rhs;
    return v;
}

// Exact values of a basis that is feasible for the unperturbed program.
std::optional<std::vector<Rational>> feasible_basis_values(const Standard& st, const BasisSystem& bs) {
    auto z = basis_solve(st, bs, row_rhs(st));
    if (!z) return std::nullopt;
    for (std::size_t v = 0; v < z->size(); ++v) {
        if (sgn((*z)[v]) < 0) return std::nullopt;
        if (st.kind[v] == VarKind::artificial && sgn((*z)[v]) != 0) return std::nullopt;
    }
    return z;
}

// ---------------------------------------------------------------------------

struct ExactCache {
    std::once_flag once;
    ExactPhase phase;
};

struct Prepared {
    Standard st;
    bool feasible = false;
    std::optional<FarkasCertificate> certificate;
    std::size_t phase1_pivots = 0;
    // Phase-1 feasible floating tableau whose basis was verified exactly.
    std::optional<FloatTableau> ftab;
    std::shared_ptr<ExactCache> exact = std::make_shared<ExactCache>();

    const ExactPhase& exact_phase() const {
        std::call_once(exact->once, [this] { exact->phase = exact_phase_one(st); });
        return exact->phase;
    }
};

Prepared prepare(const LinearProgram& lp) {
    Prepared prep;
    prep.st = make_standard(lp);
    const Standard& st = prep.st;
    if (st.pre.conflict) {
        prep.certificate = st.pre.conflict;
        return prep;
    }
    FloatTableau tab = float_tableau(st);
    tab.kind = &prep.st.kind;
    bool settled = false;
    if (!st.any_artificial) {
        settled = true;
    } else {
        std::vector<double> cost(st.kind.size(), 0.0);
        std::vector<Rational> exact_cost(st.kind.size());
        for (std::size_t v = 0; v < st.kind.size(); ++v) {
            if (st.kind[v] == VarKind::artificial) {
                cost[v] = -1.0;
                exact_cost[v] = -1;
            }
        }
        tab.set_objective(cost);
        std::size_t ub = 0;
        auto result = tab.optimise(&ub, -kFeasTol);
        prep.phase1_pivots = tab.pivots;
        auto bs = result == FloatTableau::Result::optimal ? basis_system(st, tab.basic) : std::nullopt;
        if (bs && tab.obj_value < -kFeasTol) {
            if (auto y = basis_duals(st, *bs, exact_cost)) {
                auto cert = certificate_from_duals(st, *y);
                if (verify_certificate(lp, cert)) {
                    prep.certificate = std::move(cert);
                    return prep;
                }
            }
        } else if (bs && feasible_basis_values(st, *bs)) {
            settled = true;
            for (std::size_t j = 0; j < tab.cols; ++j) {
                if (st.kind[tab.nonbasic[j]] == VarKind::artificial) tab.blocked[j] = true;
            }
            tab.pin_artificials = true;
        }
    }
    if (settled) {
        prep.feasible = true;
        prep.ftab = std::move(tab);
        return prep;
    }
    const auto& exact = prep.exact_phase();
    prep.phase1_pivots += exact.tab.pivots;
    prep.feasible = exact.feasible;
    prep.certificate = exact.certificate;
    return prep;
}

std::vector<Rational> to_point(const Standard& st, const std::vector<Rational>& values, bool with_shift) {
    const LinearProgram& lp = *st.lp;
    std::vector<Rational> point(lp.variables);
    for (std::size_t j = 0; j < lp.variables; ++j) {
        if (st.pre.fixed[j]) point[j] = with_shift ? *st.pre.fixed[j] : Rational(0);
    }
    for (std::size_t r = 0; r < st.free_vars.size(); ++r) {
        std::size_t v = st.free_vars[r];
        if (with_shift && lp.lower[v]) point[v] = *lp.lower[v];
    }
    for (std::size_t c = 0; c < st.structural(); ++c) {
        const auto& col = st.columns[c];
        point[st.free_vars[col.var]] += values[c] * col.sign;
    }
    return point;
}

LPOutcome finish(const Standard& st, const std::vector<Term>& objective, Sense sense, std::vector<Rational> point,
                 std::optional<std::vector<Rational>> ray) {
    const LinearProgram& lp = *st.lp;
    if (!satisfies(lp, point)) throw std::logic_error("simplex produced an infeasible point");
    if (ray) {
        Rational slope;
        for (const auto& t : objective) slope += t.coeff * (*ray)[t.var];
        if (!verify_ray(lp, *ray) || (sense == Sense::maximize ? slope <= 0 : slope >= 0)) {
            throw std::logic_error("simplex produced an invalid unbounded ray");
        }
        return Unbounded{std::move(point), std::move(*ray)};
    }
    Rational value;
    for (const auto& t : objective) value += t.coeff * point[t.var];
    return Optimal{std::move(value), std::move(point)};
}

// Phase 2 on the floating tableau, accepted only if the final basis is
// exactly primal feasible and dual feasible (or yields an exact ray).
std::optional<LPOutcome> optimise_float(const Prepared& prep, const std::vector<Rational>& cost,
                                        const std::vector<Term>& objective, Sense sense, SolveStats* stats) {
    const Standard& st = prep.st;
    FloatTableau tab = *prep.ftab;
    tab.kind = &st.kind;
    std::vector<double> fcost(cost.size());
    bool trivial = true;
    for (std::size_t v = 0; v < cost.size(); ++v) {
        fcost[v] = cost[v].get_d();
        trivial = trivial && is_zero(cost[v]);
    }
    std::size_t ub_col = 0;
    auto result = FloatTableau::Result::optimal;
    if (!trivial) {
        tab.set_objective(fcost);
        result = tab.optimise(&ub_col);
    }
    if (stats) stats->pivots += tab.pivots - prep.ftab->pivots;
    if (result == FloatTableau::Result::stalled) return std::nullopt;
    auto bs = basis_system(st, tab.basic);
    if (!bs) return std::nullopt;
    auto values = feasible_basis_values(st, *bs);
    if (!values) return std::nullopt;
    auto point = to_point(st, *values, true);
    if (result == FloatTableau::Result::unbounded) {
        const std::size_t entering = tab.nonbasic[ub_col];
        auto w = basis_solve(st, *bs, variable_column(st, entering));
        if (!w) return std::nullopt;
        std::vector<Rational> dir(st.kind.size());
        for (std::size_t v : tab.basic) dir[v] = -(*w)[v];
        dir[entering] = 1;
        for (std::size_t v : tab.basic) {
            if (st.kind[v] == VarKind::artificial && sgn(dir[v]) != 0) return std::nullopt;
            if (sgn(dir[v]) < 0) return std::nullopt;
        }
        auto ray = to_point(st, dir, false);
        Rational slope;
        for (const auto& t : objective) slope += t.coeff * ray[t.var];
        if (!verify_ray(*st.lp, ray) || (sense == Sense::maximize ? slope <= 0 : slope >= 0)) return std::nullopt;
        return finish(st, objective, sense, std::move(point), std::move(ray));
    }
    if (!trivial) {
        auto y = basis_duals(st, *bs, cost);
        if (!y) return std::nullopt;
        std::vector<bool> in_basis(st.kind.size(), false);
        for (std::size_t v : tab.basic) in_basis[v] = true;
        for (std::size_t v = 0; v < st.kind.size(); ++v) {
            if (in_basis[v] || st.kind[v] == VarKind::artificial) continue;
            if (sgn(reduced_cost(st, *y, cost, v)) > 0) return std::nullopt;
        }
    }
    return finish(st, objective, sense, std::move(point), std::nullopt);
}

LPOutcome optimise_exact(const Prepared& prep, const std::vector<Rational>& cost, const std::vector<Term>& objective,
                         Sense sense, SolveStats* stats) {
    const Standard& st = prep.st;
    const auto& phase = prep.exact_phase();
    Tableau tab = phase.tab;
    const std::size_t before = tab.pivots;
    tab.set_objective(cost);
    std::size_t ub_col = 0;
    auto result = tab.optimise(&ub_col);
    if (stats) stats->pivots += tab.pivots - before;

    std::vector<Rational> col_value(tab.kind.size());
    for (std::size_t i = 0; i < tab.rows; ++i) col_value[tab.basic[i]] = tab.beta[i];
    auto point = to_point(st, col_value, true);
    if (result == Tableau::Result::unbounded) {
        std::vector<Rational> dir(tab.kind.size());
        dir[tab.nonbasic[ub_col]] = 1;
        for (std::size_t i = 0; i < tab.rows; ++i) dir[tab.basic[i]] = -tab.d[i][ub_col];
        return finish(st, objective, sense, std::move(point), to_point(st, dir, false));
    }
    return finish(st, objective, sense, std::move(point), std::nullopt);
}

LPOutcome optimise_prepared(const Prepared& prep, const std::vector<Term>& objective, Sense sense,
                            SolveStats* stats) {
    const Standard& st = prep.st;
    std::vector<Rational> obj_dense(st.lp->variables);
    for (const auto& t : objective) obj_dense[t.var] += t.coeff;
    std::vector<Rational> cost(st.kind.size());
    for (std::size_t c = 0; c < st.structural(); ++c) {
        const auto& col = st.columns[c];
        Rational coeff = obj_dense[st.free_vars[col.var]] * col.sign;
        cost[c] = sense == Sense::maximize ? coeff : Rational(-coeff);
    }
    if (stats) {
        stats->rows = st.rows.size();
        stats->columns = st.structural();
    }
    if (prep.ftab) {
        if (auto out = optimise_float(prep, cost, objective, sense, stats)) return *out;
    }
    return optimise_exact(prep, cost, objective, sense, stats);
}

}  // namespace

bool satisfies(const LinearProgram& lp, const std::vector<Rational>& point) {
    if (point.size() != lp.variables) return false;
    for (std::size_t j = 0; j < lp.variables; ++j) {
        if (lp.lower[j] && point[j] < *lp.lower[j]) return false;
        if (lp.upper[j] && point[j] > *lp.upper[j]) return false;
    }
    for (const auto& c : lp.constraints) {
        Rational lhs;
        for (const auto& t : c.terms) lhs += t.coeff * point[t.var];
        if (!relation_holds(lhs, c.rel, c.rhs)) return false;
    }
    return true;
}

bool verify_certificate(const LinearProgram& lp, const FarkasCertificate& cert) {
    if (cert.rows.size() != lp.constraints.size() || cert.lower.size() != lp.variables ||
        cert.upper.size() != lp.variables) {
        return false;
    }
    std::vector<Rational> combo(lp.variables);
    Rational rhs;
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& y = cert.rows[i];
        if (is_zero(y)) continue;
        const auto& c = lp.constraints[i];
        if (c.rel == Relation::ge && y < 0) return false;
        if (c.rel == Relation::le && y > 0) return false;
        for (const auto& t : c.terms) combo[t.var] += y * t.coeff;
        rhs += y * c.rhs;
    }
    for (std::size_t j = 0; j < lp.variables; ++j) {
        if (!is_zero(cert.lower[j])) {
            if (!lp.lower[j] || cert.lower[j] < 0) return false;
            combo[j] += cert.lower[j];
            rhs += cert.lower[j] * *lp.lower[j];
        }
        if (!is_zero(cert.upper[j])) {
            if (!lp.upper[j] || cert.upper[j] > 0) return false;
            combo[j] += cert.upper[j];
            rhs += cert.upper[j] * *lp.upper[j];
        }
    }
    for (const auto& v : combo) {
        if (!is_zero(v)) return false;
    }
    return rhs > 0;
}

bool verify_ray(const LinearProgram& lp, const std::vector<Rational>& ray) {
    if (ray.size() != lp.variables) return false;
    for (std::size_t j = 0; j < lp.variables; ++j) {
        if (lp.lower[j] && ray[j] < 0) return false;
        if (lp.upper[j] && ray[j] > 0) return false;
    }
    for (const auto& c : lp.constraints) {
        Rational lhs;
        for (const auto& t : c.terms) lhs += t.coeff * ray[t.var];
        if (!relation_holds(lhs, c.rel, Rational(0))) return false;
    }
    return true;
}

Rational objective_value(const LinearProgram& lp, const std::vector<Rational>& point) {
    Rational v;
    for (const auto& t : lp.objective) v += t.coeff * point[t.var];
    return v;
}

LPOutcome solve(const LinearProgram& lp, SolveStats* stats) {
    validate(lp);
    Prepared prep = prepare(lp);
    if (stats) {
        stats->pivots += prep.phase1_pivots;
        stats->presolved_fixed += prep.st.pre.fix_log.size();
    }
    if (!prep.feasible) {
        if (!verify_certificate(lp, *prep.certificate)) {
            throw std::logic_error("simplex produced an invalid infeasibility certificate");
        }
        return Infeasible{*prep.certificate};
    }
    return optimise_prepared(prep, lp.objective, lp.sense, stats);
}

LPOutcome check_feasible(const LinearProgram& lp, SolveStats* stats) {
    LinearProgram copy = lp;
    copy.objective.clear();
    return solve(copy, stats);
}

std::string describe(const LPOutcome& o) {
    std::ostringstream out;
    if (const auto* opt = std::get_if<Optimal>(&o)) {
        out << "optimal " << to_string(opt->value);
    } else if (std::holds_alternative<Infeasible>(o)) {
        out << "infeasible";
    } else {
        out << "unbounded";
    }
    return out.str();
}

struct RegionOptimizer::State {
    LinearProgram lp;
    Prepared prep;
};

RegionOptimizer::RegionOptimizer(LinearProgram lp) : state_(std::make_unique<State>()) {
    validate(lp);
    state_->lp = std::move(lp);
    state_->prep = prepare(state_->lp);
    if (!state_->prep.feasible && !verify_certificate(state_->lp, *state_->prep.certificate)) {
        throw std::logic_error("simplex produced an invalid infeasibility certificate");
    }
}

RegionOptimizer::~RegionOptimizer() = default;
RegionOptimizer::RegionOptimizer(RegionOptimizer&&) noexcept = default;
RegionOptimizer& RegionOptimizer::operator=(RegionOptimizer&&) noexcept = default;

bool RegionOptimizer::feasible() const { return state_->prep.feasible; }

const std::optional<FarkasCertificate>& RegionOptimizer::certificate() const {
    return state_->prep.certificate;
}

LPOutcome RegionOptimizer::optimize(const std::vector<Term>& objective, Sense sense, SolveStats* stats) const {
    if (!feasible()) return Infeasible{*state_->prep.certificate};
    for (const auto& t : objective) {
        if (t.var >= state_->lp.variables) throw DomainError("objective references variable out of range");
    }
    return optimise_prepared(state_->prep, objective, sense, stats);
}

}  // namespace sds::lp
