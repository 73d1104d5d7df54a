#include "submaslov/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

#include "submaslov/errors.hpp"

namespace submaslov {

struct Expression::Node {
    enum class Kind { Constant, Variable, Unary, Binary } kind;
    double constant = 0.0;
    int var = 0;
    char op = 0; // binary: + - * / ^
    std::function<double(double)> fn;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(const Vector& vars) const {
        switch (kind) {
        case Kind::Constant: return constant;
        case Kind::Variable: return vars(var);
        case Kind::Unary: return fn(lhs->eval(vars));
        case Kind::Binary: {
            const double a = lhs->eval(vars);
            const double b = rhs->eval(vars);
            switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
            }
        }
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->constant = v;
    return n;
}

NodePtr make_var(int i) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->var = i;
    return n;
}

NodePtr make_unary(std::function<double(double)> f, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->fn = std::move(f);
    n->lhs = std::move(arg);
    return n;
}

NodePtr make_binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

struct Parser {
    const std::string& s;
    int n_vars;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("expression error at column " + std::to_string(pos + 1) + ": " + msg +
                          " in '" + s + "'");
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (eat('+')) lhs = make_binary('+', lhs, parse_term());
            else if (eat('-')) lhs = make_binary('-', lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_power();
        for (;;) {
            if (eat('*')) lhs = make_binary('*', lhs, parse_power());
            else if (eat('/')) lhs = make_binary('/', lhs, parse_power());
            else return lhs;
        }
    }

    NodePtr parse_power() { // right associative
        NodePtr base = parse_unary();
        if (eat('^')) return make_binary('^', base, parse_power());
        return base;
    }

    NodePtr parse_unary() {
        if (eat('-')) return make_unary([](double x) { return -x; }, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        std::size_t end = pos;
        while (end < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
                s[end] == 'e' || s[end] == 'E' ||
                ((s[end] == '+' || s[end] == '-') && end > pos &&
                 (s[end - 1] == 'e' || s[end - 1] == 'E'))))
            ++end;
        try {
            const double v = std::stod(s.substr(pos, end - pos));
            pos = end;
            return make_const(v);
        } catch (const std::exception&) {
            fail("malformed number");
        }
    }

    NodePtr parse_ident() {
        std::size_t end = pos;
        while (end < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
            ++end;
        const std::string name = s.substr(pos, end - pos);
        pos = end;
        if (name == "pi") return make_const(3.14159265358979323846);
        if (name == "e") return make_const(2.71828182845904523536);
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
            if (digits) {
                const int idx = std::stoi(name.substr(1));
                if (idx >= n_vars) fail("variable " + name + " out of range");
                return make_var(idx);
            }
        }
        static const std::pair<const char*, double (*)(double)> fns[] = {
            {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
            {"asin", std::asin}, {"acos", std::acos}, {"atan", std::atan},
            {"sinh", std::sinh}, {"cosh", std::cosh}, {"tanh", std::tanh},
            {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
            {"abs", std::fabs},
        };
        for (const auto& [fname, fp] : fns) {
            if (name == fname) {
                if (!eat('(')) fail("expected '(' after " + name);
                NodePtr arg = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return make_unary(fp, arg);
            }
        }
        fail("unknown identifier '" + name + "'");
    }
};

} // namespace

Expression Expression::parse(const std::string& text, int n_vars) {
    Parser p{text, n_vars};
    NodePtr root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return Expression(text, std::move(root));
}

Expression::Expression(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

double Expression::eval(const Vector& vars) const { return root_->eval(vars); }

} // namespace submaslov
