#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xorsat {

// One byte per variable, value 0 or 1; index i holds variable i+1.
using Assignment = std::vector<std::uint8_t>;

struct Literal {
    int var = 0;  // 1-based
    bool negated = false;

    bool operator==(const Literal&) const = default;
};

struct Clause {
    std::vector<Literal> literals;

    bool operator==(const Clause&) const = default;
};

struct Formula {
    int num_vars = 0;
    std::vector<Clause> clauses;
    std::string name;  // source identifier, usually the file stem
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line)
        : std::runtime_error(msg + " at line " + std::to_string(line)), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

struct ParseResult {
    Formula formula;
    // The `p cnf` header declared a different clause count than the file
    // contains. Tolerated: real corpora are sloppy about this.
    bool clause_count_mismatch = false;
};

namespace detail {

inline bool parse_long(std::string_view tok, long& out) {
    const char* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && p == end;
}

}  // namespace detail

// DIMACS CNF reader. Comment lines are skipped, duplicate literals within a
// clause are dropped, a final clause without its 0 terminator is accepted.
inline ParseResult parse_dimacs(std::istream& in, std::string name = "") {
    ParseResult res;
    Formula& f = res.formula;
    f.name = std::move(name);

    bool seen_header = false;
    long declared = 0;
    std::vector<Literal> lits;

    std::string line;
    std::string tok;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream words(line);
        if (!(words >> tok)) continue;  // blank line
        if (tok[0] == 'c') continue;
        if (tok[0] == 'p') {
            if (seen_header) throw ParseError("duplicate header", line_no);
            std::string kind, extra;
            long nv = -1, nc = -1;
            std::string v_tok, c_tok;
            if (tok != "p" || !(words >> kind) || kind != "cnf" ||
                !(words >> v_tok) || !detail::parse_long(v_tok, nv) || nv < 0 ||
                !(words >> c_tok) || !detail::parse_long(c_tok, nc) || nc < 0 ||
                (words >> extra))
                throw ParseError("malformed 'p cnf' header", line_no);
            f.num_vars = static_cast<int>(nv);
            declared = nc;
            seen_header = true;
            continue;
        }
        if (!seen_header) throw ParseError("clause data before 'p cnf' header", line_no);
        for (;;) {
            long v = 0;
            if (!detail::parse_long(tok, v))
                throw ParseError("expected integer token, got '" + tok + "'", line_no);
            if (v == 0) {
                if (lits.empty()) throw ParseError("empty clause", line_no);
                f.clauses.push_back(Clause{lits});
                lits.clear();
            } else {
                if (v > f.num_vars || -v > f.num_vars)
                    throw ParseError("literal out of range", line_no);
                Literal lit{static_cast<int>(v < 0 ? -v : v), v < 0};
                if (std::find(lits.begin(), lits.end(), lit) == lits.end())
                    lits.push_back(lit);
            }
            if (!(words >> tok)) break;
        }
    }
    if (!seen_header) throw ParseError("missing 'p cnf' header", line_no == 0 ? 1 : line_no);
    if (!lits.empty()) f.clauses.push_back(Clause{lits});  // no trailing 0 before EOF
    res.clause_count_mismatch = declared != static_cast<long>(f.clauses.size());
    return res;
}

inline ParseResult parse_dimacs(std::string_view text, std::string name = "") {
    std::istringstream in{std::string(text)};
    return parse_dimacs(in, std::move(name));
}

inline bool satisfied(const Literal& lit, const Assignment& a) {
    bool v = a[static_cast<std::size_t>(lit.var) - 1] != 0;
    return lit.negated ? !v : v;
}

inline void check_length(const Formula& f, const Assignment& a, const char* who) {
    if (a.size() != static_cast<std::size_t>(f.num_vars))
        throw std::invalid_argument(std::string(who) + ": assignment length " +
                                    std::to_string(a.size()) + " != num_vars " +
                                    std::to_string(f.num_vars));
}

inline bool evaluate(const Formula& f, const Assignment& a) {
    check_length(f, a, "evaluate");
    for (const Clause& c : f.clauses) {
        bool sat = false;
        for (const Literal& lit : c.literals)
            if (satisfied(lit, a)) {
                sat = true;
                break;
            }
        if (!sat) return false;
    }
    return true;
}

// Indices of clauses with no satisfied literal, ascending.
inline std::vector<std::size_t> unsat_clauses(const Formula& f, const Assignment& a) {
    check_length(f, a, "unsat_clauses");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        bool sat = false;
        for (const Literal& lit : f.clauses[i].literals)
            if (satisfied(lit, a)) {
                sat = true;
                break;
            }
        if (!sat) out.push_back(i);
    }
    return out;
}

// Canonical text encoding: one '0'/'1' per variable, variable 1 first,
// newline-terminated. This exact byte form feeds the compressor, so it must
// never change.
inline std::string serialize_assignment(const Assignment& a) {
    std::string line;
    line.reserve(a.size() + 1);
    for (std::uint8_t b : a) line.push_back(b ? '1' : '0');
    line.push_back('\n');
    return line;
}

inline Assignment parse_assignment(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    Assignment a;
    a.reserve(line.size());
    for (char ch : line) {
        if (ch != '0' && ch != '1')
            throw std::invalid_argument("parse_assignment: invalid character");
        a.push_back(ch == '1');
    }
    return a;
}

inline std::string to_dimacs(const Formula& f) {
    std::string out = "p cnf " + std::to_string(f.num_vars) + ' ' +
                      std::to_string(f.clauses.size()) + '\n';
    for (const Clause& c : f.clauses) {
        for (const Literal& l : c.literals) {
            if (l.negated) out += '-';
            out += std::to_string(l.var);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

inline std::size_t hamming(const Assignment& a, const Assignment& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

}  // namespace xorsat
