#pragma once

#include <memory>
#include <string>

namespace bianchi {

/// Closed-form scalar expression in the variables `v` and `kappa`.
/// Grammar: + - * / ^, parentheses, numbers, pi, sin cos tan exp log sqrt.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text);

    double operator()(double v, double kappa) const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace bianchi
