#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pb/core.hpp"

namespace pb {

// Parse failure with the offending line and field, e.g.
// "line 12: vote references undeclared project id 'p5'".
struct ParseError : std::runtime_error {
    int line;
    explicit ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

// One parsed .pb file. META keys, extra project/vote columns and their order
// are preserved verbatim so that write(parse(text)) round-trips.
struct PabulibFile {
    std::vector<std::pair<std::string, std::string>> meta;  // ordered key -> value
    Instance instance;

    std::vector<std::string> project_columns;  // header order, includes project_id/cost
    std::vector<std::string> vote_columns;     // header order, includes voter_id/vote
    // extra (non-required) fields per project / voter, aligned with the
    // extra column names in the headers above
    std::vector<std::vector<std::string>> extra_project_fields;
    std::vector<std::vector<std::string>> extra_vote_fields;

    const std::string* meta_value(const std::string& key) const;
};

// Parses the Pabulib three-section text format:
//   META / key;value rows, PROJECTS / semicolon rows, VOTES / semicolon rows.
// Project tiebreak_rank = order of appearance; budget = floor of the numeric
// "budget" META value. Accepts CRLF and LF. Only vote_type approval.
PabulibFile parse_pabulib(const std::string& text);

// Deterministic serialization (LF line endings, semicolon separators,
// projects in tiebreak_rank order, voters in original order).
std::string write_pabulib(const PabulibFile& file);

PabulibFile load_pabulib_file(const std::string& path);

// Minimal PabulibFile around an in-memory instance (budget/vote_type meta,
// required columns only). Handy for emitting synthetic instances.
PabulibFile wrap_instance(const Instance& instance, const std::string& description = "");

}  // namespace pb
