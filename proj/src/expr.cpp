#include "amn/expr.hpp"

namespace amn {
namespace {

// Higher binds tighter. Mirrors the parser's precedence ladder.
int precedence(Expr::Op op) {
    switch (op) {
        case Expr::Op::Or: return 1;
        case Expr::Op::And: return 2;
        case Expr::Op::Eq:
        case Expr::Op::Ne:
        case Expr::Op::Lt:
        case Expr::Op::Le:
        case Expr::Op::Gt:
        case Expr::Op::Ge: return 3;
        case Expr::Op::Add:
        case Expr::Op::Sub: return 4;
        case Expr::Op::Mul:
        case Expr::Op::Div: return 5;
        default: return 6;
    }
}

const char* op_text(Expr::Op op) {
    switch (op) {
        case Expr::Op::Or: return "||";
        case Expr::Op::And: return "&&";
        case Expr::Op::Eq: return "==";
        case Expr::Op::Ne: return "!=";
        case Expr::Op::Lt: return "<";
        case Expr::Op::Le: return "<=";
        case Expr::Op::Gt: return ">";
        case Expr::Op::Ge: return ">=";
        case Expr::Op::Add: return "+";
        case Expr::Op::Sub: return "-";
        case Expr::Op::Mul: return "*";
        case Expr::Op::Div: return "/";
        default: return "?";
    }
}

void render(const Expr& e, int parent_prec, std::string& out) {
    switch (e.kind) {
        case Expr::Kind::Literal:
            out += e.literal.to_text();
            return;
        case Expr::Kind::Var:
            if (e.scope == Expr::Scope::Selected) out += "selected.";
            if (e.scope == Expr::Scope::Object) out += "object.";
            out += e.name;
            return;
        case Expr::Kind::Unary: {
            out += e.op == Expr::Op::Not ? "!" : "-";
            // Parenthesize a unary operand so two sign characters never touch.
            bool wrap = e.lhs->kind == Expr::Kind::Unary;
            if (wrap) out += '(';
            render(*e.lhs, precedence(Expr::Op::None), out);
            if (wrap) out += ')';
            return;
        }
        case Expr::Kind::Binary: {
            int p = precedence(e.op);
            bool paren = p < parent_prec;
            if (paren) out += '(';
            // Comparisons do not chain, so a comparison operand of a
            // comparison keeps its parens; the other levels associate left.
            bool non_assoc = p == precedence(Expr::Op::Lt);
            render(*e.lhs, p + (non_assoc ? 1 : 0), out);
            out += ' ';
            out += op_text(e.op);
            out += ' ';
            // Right operand needs parens at equal precedence: ops associate left.
            render(*e.rhs, p + 1, out);
            if (paren) out += ')';
            return;
        }
    }
}

} // namespace

Expr Expr::lit(Value v) {
    Expr e;
    e.kind = Kind::Literal;
    e.literal = std::move(v);
    return e;
}

Expr Expr::var(Scope scope, std::string name) {
    Expr e;
    e.kind = Kind::Var;
    e.scope = scope;
    e.name = std::move(name);
    return e;
}

Expr Expr::unary(Op op, Expr a) {
    Expr e;
    e.kind = Kind::Unary;
    e.op = op;
    e.lhs = std::make_shared<Expr>(std::move(a));
    return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
    Expr e;
    e.kind = Kind::Binary;
    e.op = op;
    e.lhs = std::make_shared<Expr>(std::move(a));
    e.rhs = std::make_shared<Expr>(std::move(b));
    return e;
}

bool Expr::operator==(const Expr& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Literal: return literal == o.literal;
        case Kind::Var: return scope == o.scope && name == o.name;
        case Kind::Unary: return op == o.op && *lhs == *o.lhs;
        case Kind::Binary: return op == o.op && *lhs == *o.lhs && *rhs == *o.rhs;
    }
    return false;
}

std::string Expr::to_text() const {
    std::string out;
    render(*this, 0, out);
    return out;
}

std::optional<Value> eval_expr(const Expr& e, const ExprEnv& env) {
    switch (e.kind) {
        case Expr::Kind::Literal:
            return e.literal;
        case Expr::Kind::Var:
            return env(e.scope, e.name);
        case Expr::Kind::Unary: {
            auto a = eval_expr(*e.lhs, env);
            if (!a) return std::nullopt;
            if (e.op == Expr::Op::Not) {
                if (!a->is_bool()) return std::nullopt;
                return Value(!a->as_bool());
            }
            if (!a->is_number()) return std::nullopt;
            return Value(-a->as_number());
        }
        case Expr::Kind::Binary: {
            // Short-circuit logical operators before evaluating the right side.
            if (e.op == Expr::Op::And || e.op == Expr::Op::Or) {
                auto a = eval_expr(*e.lhs, env);
                if (!a || !a->is_bool()) return std::nullopt;
                if (e.op == Expr::Op::And && !a->as_bool()) return Value(false);
                if (e.op == Expr::Op::Or && a->as_bool()) return Value(true);
                auto b = eval_expr(*e.rhs, env);
                if (!b || !b->is_bool()) return std::nullopt;
                return Value(b->as_bool());
            }
            auto a = eval_expr(*e.lhs, env);
            auto b = eval_expr(*e.rhs, env);
            if (!a || !b) return std::nullopt;
            switch (e.op) {
                case Expr::Op::Eq: return Value(*a == *b);
                case Expr::Op::Ne: return Value(*a != *b);
                case Expr::Op::Lt:
                case Expr::Op::Le:
                case Expr::Op::Gt:
                case Expr::Op::Ge: {
                    // Ordered comparison over two numbers or two strings.
                    int cmp = 0;
                    if (a->is_number() && b->is_number()) {
                        double x = a->as_number(), y = b->as_number();
                        cmp = x < y ? -1 : (x > y ? 1 : 0);
                    } else if (a->is_string() && b->is_string()) {
                        cmp = a->as_string().compare(b->as_string());
                    } else {
                        return std::nullopt;
                    }
                    switch (e.op) {
                        case Expr::Op::Lt: return Value(cmp < 0);
                        case Expr::Op::Le: return Value(cmp <= 0);
                        case Expr::Op::Gt: return Value(cmp > 0);
                        default: return Value(cmp >= 0);
                    }
                }
                case Expr::Op::Add:
                case Expr::Op::Sub:
                case Expr::Op::Mul:
                case Expr::Op::Div: {
                    if (!a->is_number() || !b->is_number()) return std::nullopt;
                    double x = a->as_number(), y = b->as_number();
                    switch (e.op) {
                        case Expr::Op::Add: return Value(x + y);
                        case Expr::Op::Sub: return Value(x - y);
                        case Expr::Op::Mul: return Value(x * y);
                        default:
                            if (y == 0) return std::nullopt;
                            return Value(x / y);
                    }
                }
                default: return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

} // namespace amn

namespace amn {

void walk_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
    fn(e);
    if (e.lhs) walk_expr(*e.lhs, fn);
    if (e.rhs) walk_expr(*e.rhs, fn);
}

} // namespace amn
