#ifndef GCLMC_EXPR_HPP
#define GCLMC_EXPR_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gclmc {

// Errors raised while evaluating or applying actions. Parse-time errors
// live in gcl.hpp.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainOverflow : ModelError {
    using ModelError::ModelError;
};
struct ActionDisabled : ModelError {
    using ModelError::ModelError;
};
struct NotDisabled : ModelError {
    using ModelError::ModelError;
};
struct StateSpaceTooLarge : ModelError {
    using ModelError::ModelError;
};

enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Neg, Not };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree over the model's integer variables.
// Comparisons and logical connectives evaluate to 0/1.
struct Expr {
    enum class Kind { IntLit, BoolLit, Var, Unary, Binary };

    Kind kind;
    std::int64_t value = 0;  // IntLit payload, BoolLit as 0/1
    int var = -1;            // Var: index into Model::vars
    std::string name;        // Var: name, kept for printing
    UnOp uop = UnOp::Neg;
    BinOp bop = BinOp::Add;
    ExprPtr lhs, rhs;

    static ExprPtr int_lit(std::int64_t v);
    static ExprPtr bool_lit(bool v);
    static ExprPtr var_ref(int index, std::string name);
    static ExprPtr unary(UnOp op, ExprPtr e);
    static ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r);

    // true if the expression denotes a truth value rather than an integer
    bool is_boolean() const;
    // variable indices read by this expression (sorted, unique)
    std::vector<int> read_set() const;
    std::string to_string() const;
    bool structurally_equal(const Expr& other) const;
};

std::int64_t evaluate(const ExprPtr& e, std::span<const std::int32_t> valuation);

inline bool evaluate_bool(const ExprPtr& e, std::span<const std::int32_t> valuation) {
    return evaluate(e, valuation) != 0;
}

}  // namespace gclmc

#endif
