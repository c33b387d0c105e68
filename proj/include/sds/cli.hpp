#pragma once

#include "sds/documents.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sds::cli {

struct Report {
    std::vector<std::string> command;
    // "fnv1a64:<16 hex digits>" over the arguments and every file read.
    std::string inputs_digest;
    // pass, fail, feasible, infeasible or value
    std::string result;
    doc::Json payload;
    doc::Json stats;
    // Excluded from the determinism contract.
    std::int64_t duration_us = 0;

    friend bool operator==(const Report&, const Report&) = default;
};

std::string to_json(const Report& report);
Report report_from_json(std::string_view text);

// 0 for pass, feasible and value; 1 for fail and infeasible.
int exit_code(const Report& report);

std::string fnv1a64(std::string_view data);

struct FigureRow {
    std::string rule;   // rule specification
    std::string label;  // RD, RD^k, OMNI*
    int k = 0;          // unanimity level the rule guarantees
    Rational boundary;  // least u(1) for u^Pi-strategyproofness
    // u(1) below this admits no k-unanimous, u^Pi-strategyproof rank-based rule.
    Rational impossible_below;
};

// Rows rd, rd_k for k = 1..min(floor((n-1)/2), max_rd_rows), omni_star.
std::vector<FigureRow> figure1(int m, const std::vector<Rational>& tail, int n, int max_rd_rows = 3,
                               const SPOptions& opts = {});

std::string format_figure(const std::vector<FigureRow>& rows);

// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
// Exit codes: 0 pass/feasible/value, 1 fail/infeasible, 2 usage error or refusal,
// 3 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sds::cli
