#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace dissipate {

/// Compactly supported C-infinity bump: exp(-1/(1-r^2)) for |r| < 1, zero otherwise.
double bump(double r) noexcept;

/// Immutable parse tree of a real-valued coefficient expression over x1..xn.
///
/// Grammar (whitespace insensitive):
///
///     expr   := term (('+' | '-') term)*
///     term   := factor (('*' | '/') factor)*
///     factor := '-' factor | power
///     power  := atom ('^' factor)?
///     atom   := number | 'pi' | ident | ident '(' expr ')' | '(' expr ')'
///
/// so `^` binds tighter than unary minus (`-x1^2 == -(x1^2)`) and is right-associative.
/// Functions: sin, cos, exp, log, sqrt, tanh, bump. Variables: x1, x2, x3, ...
///
/// Evaluation never returns NaN or infinity: any domain violation throws EvalError.
/// Copies share the tree, so an Expr is cheap to pass by value and safe to evaluate
/// from several threads.
class Expr {
public:
    /// The constant zero.
    Expr();

    static Expr parse(std::string_view text);
    static Expr constant(double value);

    double eval(std::span<const double> x) const;

    /// Fully parenthesized text that reparses to an expression with identical values.
    std::string to_string() const;

    /// Highest variable index referenced (x3 -> 3), 0 for constant expressions.
    int max_variable() const noexcept;
    bool is_constant() const noexcept { return max_variable() == 0; }

    Expr operator-() const;

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> root);
    std::shared_ptr<const Node> root_;
};

Expr parse_expression(std::string_view text);
double eval_expression(const Expr& e, std::span<const double> x);

}  // namespace dissipate
