#include "corpus.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "errors.hpp"
#include "rng.hpp"

namespace didrf {

void QuerySet::validate() const {
    if (y_max < 1) throw DataError("QuerySet: y_max must be >= 1");
    for (const Query& q : queries) {
        if (q.items.size() < 2)
            throw DataError("QuerySet: query '" + q.id + "' has fewer than 2 items");
        std::unordered_set<std::string> seen;
        for (const Item& it : q.items) {
            if (it.grade < 0 || it.grade > y_max)
                throw DataError("QuerySet: grade " + std::to_string(it.grade) + " out of 0.." +
                                std::to_string(y_max) + " in query '" + q.id + "'");
            if (!seen.insert(it.id).second)
                throw DataError("QuerySet: duplicate item id '" + it.id + "' in query '" +
                                q.id + "'");
        }
    }
}

namespace {

bool parse_int(const std::string& tok, long* out) {
    if (tok.empty()) return false;
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (errno != 0 || end != tok.c_str() + tok.size()) return false;
    *out = v;
    return true;
}

bool parse_feature_token(const std::string& tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= tok.size()) return false;
    long fid = 0;
    if (!parse_int(tok.substr(0, colon), &fid)) return false;
    const std::string val = tok.substr(colon + 1);
    char* end = nullptr;
    errno = 0;
    (void)std::strtod(val.c_str(), &end);
    return errno == 0 && end == val.c_str() + val.size();
}

// Pull `docid = <tok>` out of a LETOR comment, if present.
std::string docid_from_comment(const std::string& comment) {
    std::istringstream ss(comment);
    std::string tok;
    while (ss >> tok) {
        if (tok == "docid") {
            std::string eq, id;
            if (ss >> eq && eq == "=" && ss >> id) return id;
        }
    }
    return {};
}

}  // namespace

QuerySet parse_letor_stream(std::istream& in, int y_max, std::vector<std::string>* warnings) {
    if (y_max < 1) throw ConfigError("parse_letor: y_max must be >= 1");

    QuerySet qs;
    qs.y_max = y_max;
    std::unordered_map<std::string, std::size_t> index_of_qid;

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;

        std::string comment;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            comment = line.substr(hash + 1);
            line.erase(hash);
        }

        std::istringstream ss(line);
        std::string grade_tok;
        if (!(ss >> grade_tok)) continue;  // blank line

        long grade = 0;
        if (!parse_int(grade_tok, &grade))
            throw ParseError("malformed relevance grade '" + grade_tok + "'", line_no);
        if (grade < 0 || grade > y_max)
            throw ParseError("grade " + std::to_string(grade) + " outside 0.." +
                                 std::to_string(y_max),
                             line_no);

        std::string qid_tok;
        if (!(ss >> qid_tok) || qid_tok.rfind("qid:", 0) != 0 || qid_tok.size() <= 4)
            throw ParseError("expected qid:<id> token", line_no);
        const std::string qid = qid_tok.substr(4);

        std::string feat;
        while (ss >> feat) {
            if (!parse_feature_token(feat))
                throw ParseError("malformed feature token '" + feat + "'", line_no);
        }

        auto [it, inserted] = index_of_qid.try_emplace(qid, qs.queries.size());
        if (inserted) qs.queries.push_back(Query{qid, {}});
        Query& q = qs.queries[it->second];

        std::string item_id = docid_from_comment(comment);
        if (item_id.empty()) item_id = "d" + std::to_string(q.items.size());
        q.items.push_back(Item{std::move(item_id), static_cast<int>(grade)});
    }

    // The fairness denominator |D|(|D|-1) needs two candidates; drop thinner
    // queries instead of failing the whole corpus.
    std::vector<Query> kept;
    kept.reserve(qs.queries.size());
    for (Query& q : qs.queries) {
        if (q.items.size() >= 2) {
            kept.push_back(std::move(q));
        } else if (warnings) {
            warnings->push_back("query '" + q.id + "' dropped: fewer than 2 candidates");
        }
    }
    qs.queries = std::move(kept);

    if (qs.queries.empty()) throw DataError("empty corpus: no usable queries");
    qs.validate();
    return qs;
}

QuerySet parse_letor(const std::string& path, int y_max, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    return parse_letor_stream(in, y_max, warnings);
}

void serialize_letor(const QuerySet& qs, std::ostream& out) {
    for (const Query& q : qs.queries) {
        for (const Item& it : q.items) {
            out << it.grade << " qid:" << q.id << " 1:0 #docid = " << it.id << "\n";
        }
    }
}

double relevance_probability(int grade, int y_max, double epsilon) {
    if (y_max < 1) throw std::domain_error("relevance_probability: y_max must be >= 1");
    if (grade < 0 || grade > y_max)
        throw std::domain_error("relevance_probability: grade " + std::to_string(grade) +
                                " outside 0.." + std::to_string(y_max));
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw std::domain_error("relevance_probability: epsilon must be in [0,1)");
    // Short-circuit the endpoints so the stated identities hold exactly.
    if (grade == 0) return epsilon;
    if (grade == y_max) return 1.0;
    const double frac = (std::exp2(grade) - 1.0) / (std::exp2(y_max) - 1.0);
    return epsilon + (1.0 - epsilon) * frac;
}

RelevanceTable make_relevance_table(const QuerySet& qs, double epsilon) {
    RelevanceTable table;
    table.rel.reserve(qs.queries.size());
    for (const Query& q : qs.queries) {
        std::vector<double> row;
        row.reserve(q.items.size());
        for (const Item& it : q.items)
            row.push_back(relevance_probability(it.grade, qs.y_max, epsilon));
        table.rel.push_back(std::move(row));
    }
    return table;
}

QuerySet synth_queryset(int num_queries, int docs_per_query,
                        std::span<const double> grade_distribution, std::uint64_t seed) {
    if (num_queries < 1) throw ConfigError("synth_queryset: num_queries must be >= 1");
    if (docs_per_query < 2) throw ConfigError("synth_queryset: docs_per_query must be >= 2");
    if (grade_distribution.size() < 2)
        throw ConfigError("synth_queryset: grade_distribution needs >= 2 entries");
    double mass = 0.0;
    for (double p : grade_distribution) {
        if (p < 0.0) throw ConfigError("synth_queryset: negative probability in distribution");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw ConfigError("synth_queryset: grade_distribution must sum to 1");

    QuerySet qs;
    qs.y_max = static_cast<int>(grade_distribution.size()) - 1;
    qs.queries.reserve(static_cast<std::size_t>(num_queries));

    Rng rng(seed);
    for (int qi = 0; qi < num_queries; ++qi) {
        Query q;
        q.id = "q" + std::to_string(qi);
        q.items.reserve(static_cast<std::size_t>(docs_per_query));
        for (int di = 0; di < docs_per_query; ++di) {
            const double u = rng.next_double();
            double acc = 0.0;
            int grade = qs.y_max;
            for (std::size_t g = 0; g < grade_distribution.size(); ++g) {
                acc += grade_distribution[g];
                if (u < acc) {
                    grade = static_cast<int>(g);
                    break;
                }
            }
            q.items.push_back(Item{"d" + std::to_string(di), grade});
        }
        qs.queries.push_back(std::move(q));
    }
    qs.validate();
    return qs;
}

}  // namespace didrf
