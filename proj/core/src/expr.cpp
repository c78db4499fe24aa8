#include "dissipate/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "dissipate/errors.hpp"

namespace dissipate {

double bump(double r) noexcept {
    if (!(std::abs(r) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
}

enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh, Bump };

struct Expr::Node {
    enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

    Kind kind = Kind::Number;
    double value = 0.0;  // Number
    int variable = 0;    // Variable (1-based)
    Func func = Func::Sin;
    bool is_pi = false;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    int max_var = 0;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

struct FuncName {
    std::string_view name;
    Func func;
};

constexpr std::array<FuncName, 7> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"sqrt", Func::Sqrt},
    {"tanh", Func::Tanh},
    {"bump", Func::Bump},
}};

std::string_view func_name(Func f) {
    for (const auto& entry : kFunctions)
        if (entry.func == f) return entry.name;
    return "?";
}

NodePtr make_number(double v, bool is_pi = false) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->value = v;
    n->is_pi = is_pi;
    return n;
}

NodePtr make_variable(int k) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->variable = k;
    n->max_var = k;
    return n;
}

NodePtr make_unary(Node::Kind kind, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->max_var = arg->max_var;
    n->lhs = std::move(arg);
    return n;
}

NodePtr make_call(Func f, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->func = f;
    n->max_var = arg->max_var;
    n->lhs = std::move(arg);
    return n;
}

NodePtr make_binary(Node::Kind kind, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->max_var = std::max(l->max_var, r->max_var);
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        auto root = parse_expr();
        skip_space();
        if (pos_ < text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return root;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    // Accepts ASCII '-' and the UTF-8 minus sign U+2212.
    bool accept_minus() {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '-') {
            ++pos_;
            return true;
        }
        if (text_.substr(pos_, 3) == "\xE2\x88\x92") {
            pos_ += 3;
            return true;
        }
        return false;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(Node::Kind::Add, lhs, parse_term());
            } else if (accept_minus()) {
                lhs = make_binary(Node::Kind::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary(Node::Kind::Mul, lhs, parse_factor());
            } else if (accept('/')) {
                lhs = make_binary(Node::Kind::Div, lhs, parse_factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_factor() {
        if (accept_minus()) return make_unary(Node::Kind::Neg, parse_factor());
        auto base = parse_atom();
        if (accept('^')) return make_binary(Node::Kind::Pow, base, parse_factor());
        return base;
    }

    NodePtr parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                digits();
            } else {
                pos_ = save;  // "2e" is the number 2 followed by identifier e
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
        if (!std::isfinite(value)) throw ParseError("number out of range", start);
        return make_number(value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view ident = text_.substr(start, pos_ - start);
        skip_space();
        const bool has_call = pos_ < text_.size() && text_[pos_] == '(';

        if (ident == "pi") {
            if (has_call) throw ParseError("'pi' is a constant and takes no arguments", start);
            return make_number(std::numbers::pi, true);
        }
        if (ident.size() >= 2 && ident[0] == 'x') {
            int k = 0;
            auto [ptr, ec] = std::from_chars(ident.data() + 1, ident.data() + ident.size(), k);
            if (ec == std::errc() && ptr == ident.data() + ident.size() && k >= 1 && ident[1] != '0') {
                if (has_call) throw ParseError("variable '" + std::string(ident) + "' takes no arguments", start);
                return make_variable(k);
            }
        }
        for (const auto& entry : kFunctions) {
            if (entry.name != ident) continue;
            if (!has_call) throw ParseError("function '" + std::string(ident) + "' expects 1 argument", start);
            ++pos_;  // '('
            auto arg = parse_expr();
            if (accept(',')) throw ParseError("function '" + std::string(ident) + "' expects 1 argument", start);
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return make_call(entry.func, std::move(arg));
        }
        throw ParseError("unknown identifier '" + std::string(ident) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
    return v;
}

double eval_node(const Node& n, std::span<const double> x) {
    using K = Node::Kind;
    switch (n.kind) {
        case K::Number:
            return n.value;
        case K::Variable:
            if (static_cast<std::size_t>(n.variable) > x.size())
                throw EvalError("variable x" + std::to_string(n.variable) + " outside dimension " +
                                std::to_string(x.size()));
            return x[static_cast<std::size_t>(n.variable - 1)];
        case K::Neg:
            return -eval_node(*n.lhs, x);
        case K::Add:
            return checked(eval_node(*n.lhs, x) + eval_node(*n.rhs, x), "addition");
        case K::Sub:
            return checked(eval_node(*n.lhs, x) - eval_node(*n.rhs, x), "subtraction");
        case K::Mul:
            return checked(eval_node(*n.lhs, x) * eval_node(*n.rhs, x), "multiplication");
        case K::Div: {
            const double num = eval_node(*n.lhs, x);
            const double den = eval_node(*n.rhs, x);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(num / den, "division");
        }
        case K::Pow: {
            const double base = eval_node(*n.lhs, x);
            const double expo = eval_node(*n.rhs, x);
            if (base < 0.0 && std::trunc(expo) != expo)
                throw EvalError("negative base raised to a non-integer power");
            if (base == 0.0 && expo < 0.0) throw EvalError("zero raised to a negative power");
            return checked(std::pow(base, expo), "power");
        }
        case K::Call: {
            const double arg = eval_node(*n.lhs, x);
            switch (n.func) {
                case Func::Sin: return std::sin(arg);
                case Func::Cos: return std::cos(arg);
                case Func::Exp: return checked(std::exp(arg), "exp");
                case Func::Log:
                    if (arg <= 0.0) throw EvalError("log of a non-positive value");
                    return std::log(arg);
                case Func::Sqrt:
                    if (arg < 0.0) throw EvalError("sqrt of a negative value");
                    return std::sqrt(arg);
                case Func::Tanh: return std::tanh(arg);
                case Func::Bump: return bump(arg);
            }
        }
    }
    throw EvalError("corrupt expression node");
}

void print_node(const Node& n, std::string& out) {
    using K = Node::Kind;
    switch (n.kind) {
        case K::Number: {
            if (n.is_pi) {
                out += "pi";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case K::Variable:
            out += "x" + std::to_string(n.variable);
            return;
        case K::Neg:
            out += "(-";
            print_node(*n.lhs, out);
            out += ")";
            return;
        case K::Call:
            out += func_name(n.func);
            out += "(";
            print_node(*n.lhs, out);
            out += ")";
            return;
        default:
            break;
    }
    const char* op = n.kind == K::Add ? "+" : n.kind == K::Sub ? "-" : n.kind == K::Mul ? "*" : n.kind == K::Div ? "/" : "^";
    out += "(";
    print_node(*n.lhs, out);
    out += op;
    print_node(*n.rhs, out);
    out += ")";
}

}  // namespace

Expr::Expr() : root_(make_number(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse()); }

Expr Expr::constant(double value) {
    if (!std::isfinite(value)) throw EvalError("non-finite constant");
    if (value < 0.0) return Expr(make_unary(Node::Kind::Neg, make_number(-value)));
    return Expr(make_number(value));
}

double Expr::eval(std::span<const double> x) const { return eval_node(*root_, x); }

std::string Expr::to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

int Expr::max_variable() const noexcept { return root_->max_var; }

Expr Expr::operator-() const { return Expr(make_unary(Node::Kind::Neg, root_)); }

Expr parse_expression(std::string_view text) { return Expr::parse(text); }

double eval_expression(const Expr& e, std::span<const double> x) { return e.eval(x); }

}  // namespace dissipate
