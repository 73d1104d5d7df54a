#pragma once

#include <memory>
#include <string>

#include "submaslov/numerics.hpp"

namespace submaslov {

/// Arithmetic expression over coordinate variables x0, x1, …: the usual
/// operators (+ − * / ^), parentheses, elementary functions (sin, cos, tan,
/// asin, acos, atan, sinh, cosh, tanh, exp, log, sqrt, abs) and the
/// constants pi and e. Parse errors carry the column position.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text, int n_vars);

    double eval(const Vector& vars) const;
    const std::string& text() const { return text_; }

private:
    Expression(std::string text, std::shared_ptr<const Node> root);
    std::string text_;
    std::shared_ptr<const Node> root_;
};

} // namespace submaslov
