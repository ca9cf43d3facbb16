#include "gclmc/gcl.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace gclmc {

std::string SourceSpan::to_string() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(col_begin);
}

namespace {

enum class Tok {
    Ident, Int, KwModel, KwVar, KwInt, KwProperty, KwProcess, KwGoto,
    KwAcquire, KwRelease, KwTrue, KwFalse,
    Colon, Semi, Comma, LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Assign, Arrow, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, AndAnd, OrOr, Bang,
    End
};

struct Token {
    Tok kind;
    std::string text;
    std::int64_t value = 0;
    SourceSpan span;
};

class Lexer {
public:
    Lexer(const std::string& text, std::string file) : text_(text), file_(std::move(file)) {}

    Token next() {
        skip_ws();
        SourceSpan sp{file_, line_, col_, col_};
        if (pos_ >= text_.size())
            return {Tok::End, "", 0, sp};
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                id += text_[pos_];
                advance();
            }
            sp.col_end = col_;
            static const std::map<std::string, Tok> kw = {
                {"model", Tok::KwModel},     {"var", Tok::KwVar},
                {"int", Tok::KwInt},         {"property", Tok::KwProperty},
                {"process", Tok::KwProcess}, {"goto", Tok::KwGoto},
                {"acquire", Tok::KwAcquire}, {"release", Tok::KwRelease},
                {"true", Tok::KwTrue},       {"false", Tok::KwFalse},
            };
            auto it = kw.find(id);
            return {it == kw.end() ? Tok::Ident : it->second, id, 0, sp};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            std::string txt;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = v * 10 + (text_[pos_] - '0');
                txt += text_[pos_];
                advance();
            }
            sp.col_end = col_;
            return {Tok::Int, txt, v, sp};
        }
        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < text_.size() && text_[pos_ + 1] == b;
        };
        if (two(':', '=')) return punct(Tok::Assign, 2, sp);
        if (two('-', '>')) return punct(Tok::Arrow, 2, sp);
        if (two('!', '=')) return punct(Tok::Ne, 2, sp);
        if (two('<', '=')) return punct(Tok::Le, 2, sp);
        if (two('>', '=')) return punct(Tok::Ge, 2, sp);
        if (two('&', '&')) return punct(Tok::AndAnd, 2, sp);
        if (two('|', '|')) return punct(Tok::OrOr, 2, sp);
        switch (c) {
        case ':': return punct(Tok::Colon, 1, sp);
        case ';': return punct(Tok::Semi, 1, sp);
        case ',': return punct(Tok::Comma, 1, sp);
        case '(': return punct(Tok::LParen, 1, sp);
        case ')': return punct(Tok::RParen, 1, sp);
        case '{': return punct(Tok::LBrace, 1, sp);
        case '}': return punct(Tok::RBrace, 1, sp);
        case '[': return punct(Tok::LBracket, 1, sp);
        case ']': return punct(Tok::RBracket, 1, sp);
        case '=': return punct(Tok::Eq, 1, sp);
        case '<': return punct(Tok::Lt, 1, sp);
        case '>': return punct(Tok::Gt, 1, sp);
        case '+': return punct(Tok::Plus, 1, sp);
        case '-': return punct(Tok::Minus, 1, sp);
        case '*': return punct(Tok::Star, 1, sp);
        case '!': return punct(Tok::Bang, 1, sp);
        default:
            throw ParseError(sp, std::string("unexpected character '") + c + "'");
        }
    }

private:
    Token punct(Tok kind, int len, SourceSpan sp) {
        std::string txt = text_.substr(pos_, static_cast<std::size_t>(len));
        for (int i = 0; i < len; i++)
            advance();
        sp.col_end = col_;
        return {kind, txt, 0, sp};
    }

    void advance() {
        if (text_[pos_] == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        pos_++;
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(const std::string& text, std::string file) : lex_(text, file) { shift(); }

    Model parse_model() {
        expect(Tok::KwModel, "expected 'model'");
        model_.name = expect(Tok::Ident, "expected model name").text;
        while (cur_.kind == Tok::KwVar)
            parse_decl();
        expect(Tok::KwProperty, "expected 'property'");
        SourceSpan prop_span = cur_.span;
        model_.property_y = parse_expr();
        if (!model_.property_y->is_boolean())
            throw ParseError(prop_span, "property must be a boolean expression");
        expect(Tok::Semi, "expected ';' after property");
        while (cur_.kind == Tok::KwProcess)
            parse_process();
        if (model_.processes.empty())
            throw ParseError(cur_.span, "expected at least one process");
        expect(Tok::End, "expected end of input");
        model_.finalize();
        return std::move(model_);
    }

    ExprPtr parse_standalone_property(const Model& m) {
        model_ = m;  // borrow the symbol table
        ExprPtr e = parse_expr();
        expect(Tok::End, "expected end of expression");
        if (!e->is_boolean())
            throw ParseError(SourceSpan{"<property>", 1, 1, 1}, "property must be boolean");
        return e;
    }

private:
    void parse_decl() {
        expect(Tok::KwVar, "expected 'var'");
        Token name = expect(Tok::Ident, "expected variable name");
        if (model_.var_index(name.text) >= 0)
            throw ParseError(name.span, "duplicate variable name '" + name.text + "'");
        expect(Tok::Colon, "expected ':'");
        expect(Tok::KwInt, "expected 'int'");
        expect(Tok::LBracket, "expected '['");
        std::int64_t lo = parse_signed_int();
        expect(Tok::Comma, "expected ','");
        std::int64_t hi = parse_signed_int();
        expect(Tok::RBracket, "expected ']'");
        expect(Tok::Eq, "expected '='");
        Token init_tok = cur_;
        std::int64_t init = parse_signed_int();
        expect(Tok::Semi, "expected ';'");
        if (lo > hi || init < lo || init > hi)
            throw ParseError(init_tok.span, "initializer for '" + name.text + "' outside declared domain");
        model_.vars.push_back({name.text, static_cast<std::int32_t>(lo), static_cast<std::int32_t>(hi),
                               static_cast<std::int32_t>(init)});
    }

    void parse_process() {
        expect(Tok::KwProcess, "expected 'process'");
        Token name = expect(Tok::Ident, "expected process name");
        for (const auto& p : model_.processes)
            if (p.name == name.text)
                throw ParseError(name.span, "duplicate process name '" + name.text + "'");
        Process proc;
        proc.pid = static_cast<int>(model_.processes.size());
        proc.name = name.text;
        expect(Tok::LBrace, "expected '{'");
        std::map<std::string, int> loc_index;
        auto intern_loc = [&](const Token& t) {
            auto it = loc_index.find(t.text);
            if (it != loc_index.end())
                return it->second;
            int idx = static_cast<int>(proc.loc_names.size());
            proc.loc_names.push_back(t.text);
            loc_index.emplace(t.text, idx);
            return idx;
        };
        bool first_edge = true;
        while (cur_.kind != Tok::RBrace) {
            Token src = loc_token();
            int source = intern_loc(src);
            if (first_edge) {
                proc.initial_loc = source;
                first_edge = false;
            }
            expect(Tok::Colon, "expected ':'");
            SourceSpan guard_span = cur_.span;
            ExprPtr guard = parse_expr();
            if (!guard->is_boolean())
                throw ParseError(guard_span, "guard must be a boolean expression");
            bool guard_is_true = guard->kind == Expr::Kind::BoolLit && guard->value == 1;
            expect(Tok::Arrow, "expected '->'");

            ActionDescriptor act;
            act.pid = proc.pid;
            act.source_loc = source;
            act.guard = guard;
            int stmt_count = 0;
            std::vector<std::string> labels;
            while (cur_.kind != Tok::KwGoto) {
                stmt_count++;
                if (cur_.kind == Tok::KwAcquire || cur_.kind == Tok::KwRelease) {
                    bool acquire = cur_.kind == Tok::KwAcquire;
                    shift();
                    expect(Tok::LParen, "expected '('");
                    Token var = expect(Tok::Ident, "expected lock variable");
                    int vi = model_.var_index(var.text);
                    if (vi < 0)
                        throw ParseError(var.span, "undeclared variable '" + var.text + "'");
                    expect(Tok::RParen, "expected ')'");
                    expect(Tok::Semi, "expected ';'");
                    // acquire(v): guard v = 0, update v := pid+1
                    // release(v): guard v = pid+1, update v := 0
                    ExprPtr held = acquire ? Expr::int_lit(0) : Expr::int_lit(proc.pid + 1);
                    ExprPtr lock_guard =
                        Expr::binary(BinOp::Eq, Expr::var_ref(vi, var.text), held);
                    act.guard = guard_is_true && stmt_count == 1
                                    ? lock_guard
                                    : Expr::binary(BinOp::And, act.guard, lock_guard);
                    act.updates.push_back(
                        {vi, acquire ? Expr::int_lit(proc.pid + 1) : Expr::int_lit(0)});
                    labels.push_back((acquire ? "acquire(" : "release(") + var.text + ")");
                    if (stmt_count == 1)
                        act.hint = {acquire ? ActionHint::Kind::Acquire : ActionHint::Kind::Release, vi};
                    else
                        act.hint = {ActionHint::Kind::Plain, -1};
                } else {
                    Token var = expect(Tok::Ident, "expected statement");
                    int vi = model_.var_index(var.text);
                    if (vi < 0)
                        throw ParseError(var.span, "undeclared variable '" + var.text + "'");
                    expect(Tok::Assign, "expected ':='");
                    ExprPtr rhs = parse_expr();
                    if (rhs->is_boolean())
                        throw ParseError(var.span, "assignment needs an integer expression");
                    expect(Tok::Semi, "expected ';'");
                    act.updates.push_back({vi, rhs});
                    labels.push_back(var.text + " := " + rhs->to_string());
                    act.hint = {ActionHint::Kind::Plain, -1};
                }
            }
            // the hint only survives when the whole edge is the pure sugar
            if (stmt_count != 1 || !guard_is_true)
                act.hint = {ActionHint::Kind::Plain, -1};
            expect(Tok::KwGoto, "expected 'goto'");
            Token tgt = loc_token();
            act.target_loc = intern_loc(tgt);
            expect(Tok::Semi, "expected ';'");
            if (labels.empty())
                labels.push_back("skip");
            std::string label;
            for (std::size_t i = 0; i < labels.size(); i++)
                label += (i ? ", " : "") + labels[i];
            act.label = proc.name + "/" + label;
            act.id = static_cast<int>(model_.actions.size());
            proc.action_ids.push_back(act.id);
            model_.actions.push_back(std::move(act));
        }
        expect(Tok::RBrace, "expected '}'");
        if (proc.action_ids.empty())
            throw ParseError(name.span, "process '" + proc.name + "' has no edges");
        model_.processes.push_back(std::move(proc));
    }

    Token loc_token() {
        if (cur_.kind == Tok::Ident || cur_.kind == Tok::Int) {
            Token t = cur_;
            shift();
            return t;
        }
        throw ParseError(cur_.span, "expected a location label");
    }

    std::int64_t parse_signed_int() {
        bool neg = false;
        if (cur_.kind == Tok::Minus) {
            neg = true;
            shift();
        }
        Token t = expect(Tok::Int, "expected an integer");
        return neg ? -t.value : t.value;
    }

    // precedence climbing: || < && < comparisons < +- < *
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (cur_.kind == Tok::OrOr) {
            shift();
            e = Expr::binary(BinOp::Or, require_bool(e), require_bool(parse_and()));
        }
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_cmp();
        while (cur_.kind == Tok::AndAnd) {
            shift();
            e = Expr::binary(BinOp::And, require_bool(e), require_bool(parse_cmp()));
        }
        return e;
    }

    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        BinOp op;
        switch (cur_.kind) {
        case Tok::Eq: op = BinOp::Eq; break;
        case Tok::Ne: op = BinOp::Ne; break;
        case Tok::Lt: op = BinOp::Lt; break;
        case Tok::Le: op = BinOp::Le; break;
        case Tok::Gt: op = BinOp::Gt; break;
        case Tok::Ge: op = BinOp::Ge; break;
        default: return e;
        }
        SourceSpan sp = cur_.span;
        shift();
        ExprPtr r = parse_add();
        if (e->is_boolean() || r->is_boolean())
            throw ParseError(sp, "comparison needs integer operands");
        return Expr::binary(op, e, r);
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            BinOp op = cur_.kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
            SourceSpan sp = cur_.span;
            shift();
            ExprPtr r = parse_mul();
            if (e->is_boolean() || r->is_boolean())
                throw ParseError(sp, "arithmetic needs integer operands");
            e = Expr::binary(op, e, r);
        }
        return e;
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        while (cur_.kind == Tok::Star) {
            SourceSpan sp = cur_.span;
            shift();
            ExprPtr r = parse_unary();
            if (e->is_boolean() || r->is_boolean())
                throw ParseError(sp, "arithmetic needs integer operands");
            e = Expr::binary(BinOp::Mul, e, r);
        }
        return e;
    }

    ExprPtr parse_unary() {
        if (cur_.kind == Tok::Minus) {
            SourceSpan sp = cur_.span;
            shift();
            ExprPtr e = parse_unary();
            if (e->is_boolean())
                throw ParseError(sp, "negation needs an integer operand");
            return Expr::unary(UnOp::Neg, e);
        }
        if (cur_.kind == Tok::Bang) {
            shift();
            return Expr::unary(UnOp::Not, require_bool(parse_unary()));
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        switch (cur_.kind) {
        case Tok::Int: {
            std::int64_t v = cur_.value;
            shift();
            return Expr::int_lit(v);
        }
        case Tok::KwTrue:
            shift();
            return Expr::bool_lit(true);
        case Tok::KwFalse:
            shift();
            return Expr::bool_lit(false);
        case Tok::Ident: {
            Token t = cur_;
            shift();
            int vi = model_.var_index(t.text);
            if (vi < 0)
                throw ParseError(t.span, "undeclared variable '" + t.text + "'");
            return Expr::var_ref(vi, t.text);
        }
        case Tok::LParen: {
            shift();
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "expected ')'");
            return e;
        }
        default:
            throw ParseError(cur_.span, "expected an expression");
        }
    }

    ExprPtr require_bool(ExprPtr e) {
        if (!e->is_boolean())
            throw ParseError(cur_.span, "expected a boolean operand");
        return e;
    }

    Token expect(Tok kind, const std::string& msg) {
        if (cur_.kind != kind)
            throw ParseError(cur_.span, msg + " (found '" + (cur_.kind == Tok::End ? "<eof>" : cur_.text) + "')");
        Token t = cur_;
        shift();
        return t;
    }

    void shift() { cur_ = lex_.next(); }

    Lexer lex_;
    Token cur_{Tok::End, "", 0, {}};
    Model model_;
};

}  // namespace

Model parse(const std::string& text, const std::string& filename) {
    return Parser(text, filename).parse_model();
}

Model parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(SourceSpan{path, 0, 0, 0}, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

ExprPtr parse_property(const Model& m, const std::string& text) {
    return Parser(text, "<property>").parse_standalone_property(m);
}

std::string pretty_print(const Model& m) {
    std::ostringstream out;
    out << "model " << m.name << "\n";
    for (const auto& v : m.vars)
        out << "var " << v.name << " : int [" << v.lo << ", " << v.hi << "] = " << v.init << ";\n";
    out << "property " << m.property_y->to_string() << ";\n";
    for (const auto& p : m.processes) {
        out << "process " << p.name << " {\n";
        for (int aid : p.action_ids) {
            const auto& a = m.actions[static_cast<std::size_t>(aid)];
            out << "  " << p.loc_names[static_cast<std::size_t>(a.source_loc)] << ": ";
            if (a.hint.kind != ActionHint::Kind::Plain) {
                const auto& lock = m.vars[static_cast<std::size_t>(a.hint.var)].name;
                out << "true -> "
                    << (a.hint.kind == ActionHint::Kind::Acquire ? "acquire(" : "release(") << lock
                    << "); ";
            } else {
                out << a.guard->to_string() << " ->";
                for (const auto& u : a.updates)
                    out << " " << m.vars[static_cast<std::size_t>(u.var)].name << " := "
                        << u.rhs->to_string() << ";";
                out << " ";
            }
            out << "goto " << p.loc_names[static_cast<std::size_t>(a.target_loc)] << ";\n";
        }
        out << "}\n";
    }
    return out.str();
}

namespace {

const char* const kProg1 = R"(model prog1
var a : int [0, 2] = 0;
var b : int [0, 2] = 0;
var x : int [0, 2] = 0;
var y : int [0, 2] = 0;
property true;
process P0 {
  l0: true -> a := 0; goto l1;
  l1: true -> b := 2; goto l2;
}
process P1 {
  l0: true -> x := 1; goto l1;
  l1: true -> y := 2; goto l2;
}
)";

// prog1 behind a parallel initialization action. The initializer runs in its
// own process and both worker processes wait on the done flag, so every
// worker action is statically dependent on the initialization.
const char* const kProg2 = R"(model prog2
var a : int [0, 2] = 0;
var b : int [0, 2] = 0;
var x : int [0, 2] = 0;
var y : int [0, 2] = 0;
var f : int [0, 1] = 0;
property true;
process Init {
  l0: true -> a := 0; b := 0; x := 0; y := 0; f := 1; goto l1;
}
process P0 {
  l0: f = 1 -> a := 0; goto l1;
  l1: true -> b := 2; goto l2;
}
process P1 {
  l0: f = 1 -> x := 1; goto l1;
  l1: true -> y := 2; goto l2;
}
)";

const char* const kLockpair = R"(model lockpair
var m : int [0, 2] = 0;
var x : int [0, 2] = 0;
property true;
process P0 {
  l0: true -> acquire(m); goto l1;
  l1: true -> x := 1; goto l2;
  l2: true -> release(m); goto l3;
}
process P1 {
  l0: true -> acquire(m); goto l1;
  l1: true -> x := 2; goto l2;
  l2: true -> release(m); goto l3;
}
)";

const char* const kDeadlock2 = R"(model deadlock2
var m1 : int [0, 2] = 0;
var m2 : int [0, 2] = 0;
var x : int [0, 2] = 0;
property true;
process P0 {
  l0: true -> acquire(m1); goto l1;
  l1: true -> acquire(m2); goto l2;
  l2: true -> x := 1; goto l3;
  l3: true -> release(m1); goto l4;
  l4: true -> release(m2); goto l5;
}
process P1 {
  l0: true -> acquire(m2); goto l1;
  l1: true -> acquire(m1); goto l2;
  l2: true -> x := 2; goto l3;
  l3: true -> release(m1); goto l4;
  l4: true -> release(m2); goto l5;
}
)";

std::string indep_source(int p, int n) {
    std::ostringstream out;
    out << "model indep_" << p << "_" << n << "\n";
    for (int i = 0; i < p; i++)
        out << "var v" << i << " : int [0, " << n - 1 << "] = 0;\n";
    out << "property true;\n";
    for (int i = 0; i < p; i++) {
        out << "process P" << i << " {\n";
        for (int k = 1; k < n; k++)
            out << "  l" << k - 1 << ": true -> v" << i << " := " << k << "; goto l" << k << ";\n";
        out << "}\n";
    }
    return out.str();
}

bool parse_indep_params(const std::string& name, int& p, int& n) {
    if (name.rfind("indep(", 0) != 0 || name.back() != ')')
        return false;
    std::string inner = name.substr(6, name.size() - 7);
    std::istringstream ss(inner);
    char comma = 0;
    if (!(ss >> p >> comma >> n) || comma != ',' || !(ss >> std::ws).eof())
        return false;
    return p >= 1 && n >= 2;
}

}  // namespace

std::string reference_model_source(const std::string& name) {
    if (name == "prog1")
        return kProg1;
    if (name == "prog2")
        return kProg2;
    if (name == "lockpair")
        return kLockpair;
    if (name == "deadlock2")
        return kDeadlock2;
    int p = 0;
    int n = 0;
    if (parse_indep_params(name, p, n))
        return indep_source(p, n);
    throw ModelError("unknown reference model: " + name);
}

bool is_reference_model_name(const std::string& name) {
    int p = 0;
    int n = 0;
    return name == "prog1" || name == "prog2" || name == "lockpair" || name == "deadlock2" ||
           parse_indep_params(name, p, n);
}

Model reference_model(const std::string& name) {
    return parse(reference_model_source(name), name);
}

}  // namespace gclmc
