#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "amn/value.hpp"

namespace amn {

/// Condition and payload expressions. Variables resolve against the owning
/// instance's states; `selected.f` reads the pending candidate's payload and
/// `object.f` reads the triggering object's payload.
struct Expr {
    enum class Kind { Literal, Var, Unary, Binary };
    enum class Op {
        None,
        Not, Neg,                        // unary
        Or, And,                         // logical
        Eq, Ne, Lt, Le, Gt, Ge,          // comparison
        Add, Sub, Mul, Div,              // arithmetic
    };
    enum class Scope { State, Selected, Object };

    Kind kind = Kind::Literal;
    Value literal;            // Kind::Literal
    Scope scope = Scope::State;
    std::string name;         // Kind::Var
    Op op = Op::None;         // Kind::Unary / Kind::Binary
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;

    static Expr lit(Value v);
    static Expr var(Scope scope, std::string name);
    static Expr unary(Op op, Expr a);
    static Expr binary(Op op, Expr a, Expr b);

    bool operator==(const Expr& o) const;
    bool operator!=(const Expr& o) const { return !(*this == o); }

    /// Canonical text with minimal parentheses.
    std::string to_text() const;
};

/// Variable lookup for evaluation; returns nullopt when the name is unbound.
using ExprEnv = std::function<std::optional<Value>(Expr::Scope, const std::string&)>;

/// Evaluates an expression. Unbound variables, type mismatches, and division
/// by zero yield nullopt; guards treat that as false.
std::optional<Value> eval_expr(const Expr& e, const ExprEnv& env);

/// Calls `fn` for every node of the expression tree, pre-order.
void walk_expr(const Expr& e, const std::function<void(const Expr&)>& fn);

} // namespace amn
