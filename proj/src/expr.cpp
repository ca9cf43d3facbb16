#include "gclmc/expr.hpp"

#include <algorithm>
#include <functional>

namespace gclmc {

ExprPtr Expr::int_lit(std::int64_t v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::IntLit;
    e->value = v;
    return e;
}

ExprPtr Expr::bool_lit(bool v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::BoolLit;
    e->value = v ? 1 : 0;
    return e;
}

ExprPtr Expr::var_ref(int index, std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->var = index;
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::unary(UnOp op, ExprPtr sub) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Unary;
    e->uop = op;
    e->lhs = std::move(sub);
    return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->bop = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

bool Expr::is_boolean() const {
    switch (kind) {
    case Kind::BoolLit:
        return true;
    case Kind::IntLit:
    case Kind::Var:
        return false;
    case Kind::Unary:
        return uop == UnOp::Not;
    case Kind::Binary:
        switch (bop) {
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
            return false;
        default:
            return true;
        }
    }
    return false;
}

std::vector<int> Expr::read_set() const {
    std::vector<int> out;
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind == Kind::Var)
            out.push_back(e.var);
        if (e.lhs)
            walk(*e.lhs);
        if (e.rhs)
            walk(*e.rhs);
    };
    walk(*this);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

const char* binop_text(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

int binop_prec(BinOp op) {
    switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 3;
    case BinOp::Add:
    case BinOp::Sub: return 4;
    case BinOp::Mul: return 5;
    }
    return 0;
}

void print(const Expr& e, int parent_prec, std::string& out) {
    switch (e.kind) {
    case Expr::Kind::IntLit:
        out += std::to_string(e.value);
        break;
    case Expr::Kind::BoolLit:
        out += e.value ? "true" : "false";
        break;
    case Expr::Kind::Var:
        out += e.name;
        break;
    case Expr::Kind::Unary:
        out += e.uop == UnOp::Neg ? "-" : "!";
        out += "(";
        print(*e.lhs, 0, out);
        out += ")";
        break;
    case Expr::Kind::Binary: {
        int prec = binop_prec(e.bop);
        bool paren = prec < parent_prec;
        if (paren)
            out += "(";
        print(*e.lhs, prec, out);
        out += " ";
        out += binop_text(e.bop);
        out += " ";
        print(*e.rhs, prec + 1, out);
        if (paren)
            out += ")";
        break;
    }
    }
}

}  // namespace

std::string Expr::to_string() const {
    std::string out;
    print(*this, 0, out);
    return out;
}

bool Expr::structurally_equal(const Expr& o) const {
    if (kind != o.kind)
        return false;
    switch (kind) {
    case Kind::IntLit:
    case Kind::BoolLit:
        return value == o.value;
    case Kind::Var:
        return var == o.var;
    case Kind::Unary:
        return uop == o.uop && lhs->structurally_equal(*o.lhs);
    case Kind::Binary:
        return bop == o.bop && lhs->structurally_equal(*o.lhs) && rhs->structurally_equal(*o.rhs);
    }
    return false;
}

std::int64_t evaluate(const ExprPtr& e, std::span<const std::int32_t> valuation) {
    switch (e->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
        return e->value;
    case Expr::Kind::Var:
        return valuation[static_cast<std::size_t>(e->var)];
    case Expr::Kind::Unary: {
        std::int64_t v = evaluate(e->lhs, valuation);
        return e->uop == UnOp::Neg ? -v : (v == 0 ? 1 : 0);
    }
    case Expr::Kind::Binary: {
        if (e->bop == BinOp::And)
            return evaluate(e->lhs, valuation) != 0 && evaluate(e->rhs, valuation) != 0;
        if (e->bop == BinOp::Or)
            return evaluate(e->lhs, valuation) != 0 || evaluate(e->rhs, valuation) != 0;
        std::int64_t l = evaluate(e->lhs, valuation);
        std::int64_t r = evaluate(e->rhs, valuation);
        switch (e->bop) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Eq: return l == r;
        case BinOp::Ne: return l != r;
        case BinOp::Lt: return l < r;
        case BinOp::Le: return l <= r;
        case BinOp::Gt: return l > r;
        case BinOp::Ge: return l >= r;
        default: break;
        }
        break;
    }
    }
    throw ModelError("malformed expression");
}

}  // namespace gclmc
