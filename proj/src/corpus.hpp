#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace didrf {

struct Item {
    std::string id;
    int grade = 0;
};

struct Query {
    std::string id;
    std::vector<Item> items;
};

// A graded ranking corpus. Grades live in 0..y_max; every query keeps at
// least two candidates so the pairwise fairness metric is defined.
struct QuerySet {
    std::vector<Query> queries;
    int y_max = 4;

    // Throws DataError on any violated invariant.
    void validate() const;
};

// Parse a LETOR-format file: `<grade> qid:<id> <fid>:<val> ... # comment`.
// Feature values are checked syntactically and discarded; no in-scope policy
// consumes them. Item ids come from a `docid = <tok>` comment when present,
// otherwise d0, d1, ... per query. Queries with fewer than two candidates are
// dropped with a warning pushed to `warnings`.
QuerySet parse_letor(const std::string& path, int y_max = 4,
                     std::vector<std::string>* warnings = nullptr);
QuerySet parse_letor_stream(std::istream& in, int y_max = 4,
                            std::vector<std::string>* warnings = nullptr);

// Inverse of parse_letor modulo feature values (a single placeholder feature
// is emitted). Round-trips qid grouping, item ids and grades.
void serialize_letor(const QuerySet& qs, std::ostream& out);

// P(r=1 | grade) = epsilon + (1 - epsilon) * (2^grade - 1) / (2^y_max - 1).
// Exact at the endpoints: grade 0 gives epsilon, grade y_max gives 1.
double relevance_probability(int grade, int y_max, double epsilon);

// True relevance probabilities, aligned with QuerySet item order.
struct RelevanceTable {
    std::vector<std::vector<double>> rel;
};

RelevanceTable make_relevance_table(const QuerySet& qs, double epsilon);

// Deterministic synthetic corpus; grades drawn i.i.d. from grade_distribution
// (a probability vector over 0..y_max).
QuerySet synth_queryset(int num_queries, int docs_per_query,
                        std::span<const double> grade_distribution, std::uint64_t seed);

}  // namespace didrf
