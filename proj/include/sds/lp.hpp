#pragma once

#include "sds/rational.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sds::lp {

enum class Relation { le, eq, ge };
enum class Sense { maximize, minimize };

struct Term {
    std::size_t var;
    Rational coeff;
};

// Sparse row: sum of terms (rel) rhs.
struct Constraint {
    std::vector<Term> terms;
    Relation rel = Relation::le;
    Rational rhs;
};

// Variables are free unless a bound is given.
struct LinearProgram {
    std::size_t variables = 0;
    std::vector<Term> objective;
    Sense sense = Sense::maximize;
    std::vector<Constraint> constraints;
    std::vector<std::optional<Rational>> lower;
    std::vector<std::optional<Rational>> upper;

    explicit LinearProgram(std::size_t n = 0) : variables(n), lower(n), upper(n) {}

    std::size_t add_variable(std::optional<Rational> lo = Rational(0),
                             std::optional<Rational> hi = std::nullopt);
    void add(std::vector<Term> terms, Relation rel, Rational rhs);
};

// Multipliers combining every row into `0 >= positive`:
// rows[i] >= 0 on >= rows, <= 0 on <= rows, free on equalities; the bound
// multipliers follow the same rule (lower bounds are >= rows, upper bounds <= rows).
struct FarkasCertificate {
    std::vector<Rational> rows;
    std::vector<Rational> lower;
    std::vector<Rational> upper;
};

struct Optimal {
    Rational value;
    std::vector<Rational> point;
};

struct Infeasible {
    FarkasCertificate certificate;
};

struct Unbounded {
    std::vector<Rational> point;  // feasible
    std::vector<Rational> ray;    // feasible direction improving the objective
};

using LPOutcome = std::variant<Optimal, Infeasible, Unbounded>;

struct SolveStats {
    std::size_t pivots = 0;
    std::size_t presolved_fixed = 0;
    std::size_t rows = 0;
    std::size_t columns = 0;
};

// Exact primal simplex; every outcome is re-verified before it is returned.
LPOutcome solve(const LinearProgram& lp, SolveStats* stats = nullptr);

// solve() with the objective ignored.
LPOutcome check_feasible(const LinearProgram& lp, SolveStats* stats = nullptr);

bool satisfies(const LinearProgram& lp, const std::vector<Rational>& point);
bool verify_certificate(const LinearProgram& lp, const FarkasCertificate& cert);
bool verify_ray(const LinearProgram& lp, const std::vector<Rational>& ray);
Rational objective_value(const LinearProgram& lp, const std::vector<Rational>& point);

inline bool is_optimal(const LPOutcome& o) { return std::holds_alternative<Optimal>(o); }
inline bool is_infeasible(const LPOutcome& o) { return std::holds_alternative<Infeasible>(o); }
inline bool is_unbounded(const LPOutcome& o) { return std::holds_alternative<Unbounded>(o); }

std::string describe(const LPOutcome& o);

// Shares one feasibility phase between many objectives over the same region.
class RegionOptimizer {
public:
    explicit RegionOptimizer(LinearProgram lp);
    ~RegionOptimizer();
    RegionOptimizer(RegionOptimizer&&) noexcept;
    RegionOptimizer& operator=(RegionOptimizer&&) noexcept;

    bool feasible() const;
    // Set when the region is empty.
    const std::optional<FarkasCertificate>& certificate() const;
    LPOutcome optimize(const std::vector<Term>& objective, Sense sense, SolveStats* stats = nullptr) const;

private:
    struct State;
    std::unique_ptr<State> state_;
};

}  // namespace sds::lp
