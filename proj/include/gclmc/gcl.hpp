#ifndef GCLMC_GCL_HPP
#define GCLMC_GCL_HPP

#include <stdexcept>
#include <string>

#include "gclmc/model.hpp"

namespace gclmc {

struct SourceSpan {
    std::string file;
    int line = 0;
    int col_begin = 0;
    int col_end = 0;

    std::string to_string() const;
};

struct ParseError : std::runtime_error {
    SourceSpan span;
    ParseError(SourceSpan s, const std::string& msg)
        : std::runtime_error(s.to_string() + ": " + msg), span(std::move(s)) {}
};

// Parses a guarded-command model. Grammar:
//
//   model  ::= "model" ID decl* prop proc+
//   decl   ::= "var" ID ":" "int" "[" INT "," INT "]" "=" INT ";"
//   prop   ::= "property" expr ";"
//   proc   ::= "process" ID "{" edge+ "}"
//   edge   ::= LOC ":" expr "->" stmt* "goto" LOC ";"
//   stmt   ::= ID ":=" expr ";" | "acquire" "(" ID ")" ";" | "release" "(" ID ")" ";"
//
// All statements of one edge form a single atomic action. The initial
// location of a process is the source of its first edge. acquire(v)
// desugars to guard v = 0 and update v := pid+1, release(v) to guard
// v = pid+1 and update v := 0; the sugar is retained as a hint.
Model parse(const std::string& text, const std::string& filename = "<input>");

Model parse_file(const std::string& path);

// Parses a boolean expression against an existing model's variables,
// e.g. for property overrides.
ExprPtr parse_property(const Model& m, const std::string& text);

// Canonical source form; parse(pretty_print(m)) reproduces m.
std::string pretty_print(const Model& m);

// The built-in models used throughout the test and validation suites.
// Known names: prog1, prog2, lockpair, deadlock2, indep(p,n).
Model reference_model(const std::string& name);
std::string reference_model_source(const std::string& name);
bool is_reference_model_name(const std::string& name);

}  // namespace gclmc

#endif
