#include "bianchi/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "bianchi/types.hpp"

namespace bianchi {

struct Expression::Node {
    enum Kind { Number, VarV, VarKappa, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(double v, double kappa) const
    {
        switch (kind) {
        case Number: return value;
        case VarV: return v;
        case VarKappa: return kappa;
        case Neg: return -args[0]->eval(v, kappa);
        case Add: return args[0]->eval(v, kappa) + args[1]->eval(v, kappa);
        case Sub: return args[0]->eval(v, kappa) - args[1]->eval(v, kappa);
        case Mul: return args[0]->eval(v, kappa) * args[1]->eval(v, kappa);
        case Div: return args[0]->eval(v, kappa) / args[1]->eval(v, kappa);
        case Pow: return std::pow(args[0]->eval(v, kappa), args[1]->eval(v, kappa));
        case Call: return fn(args[0]->eval(v, kappa));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node::Kind k, std::vector<NodePtr> args = {}, double value = 0.0,
             double (*fn)(double) = nullptr)
{
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->value = value;
    n->fn = fn;
    n->args = std::move(args);
    return n;
}

double f_sin(double x) { return std::sin(x); }
double f_cos(double x) { return std::cos(x); }
double f_tan(double x) { return std::tan(x); }
double f_exp(double x) { return std::exp(x); }
double f_log(double x) { return std::log(x); }
double f_sqrt(double x) { return std::sqrt(x); }

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse()
    {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size())
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("expression \"" + s_ + "\": " + what + " at offset " + std::to_string(pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Node::Add, {lhs, term()});
            else if (accept('-'))
                lhs = make(Node::Sub, {lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Node::Mul, {lhs, unary()});
            else if (accept('/'))
                lhs = make(Node::Div, {lhs, unary()});
            else
                return lhs;
        }
    }

    NodePtr unary()
    {
        if (accept('-'))
            return make(Node::Neg, {unary()});
        if (accept('+'))
            return unary();
        return power();
    }

    // right associative; binds tighter than unary minus on its left: -v^2 = -(v^2)
    NodePtr power()
    {
        NodePtr base = primary();
        if (accept('^'))
            return make(Node::Pow, {base, unary()});
        return base;
    }

    NodePtr primary()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end");
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')'))
                fail("missing ')'");
            return e;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double value = 0.0;
            const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
            if (ec != std::errc())
                fail("bad number");
            pos_ = static_cast<std::size_t>(end - s_.data());
            return make(Node::Number, {}, value);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "v")
                return make(Node::VarV);
            if (name == "kappa")
                return make(Node::VarKappa);
            if (name == "pi")
                return make(Node::Number, {}, std::numbers::pi);
            double (*fn)(double) = nullptr;
            if (name == "sin") fn = f_sin;
            else if (name == "cos") fn = f_cos;
            else if (name == "tan") fn = f_tan;
            else if (name == "exp") fn = f_exp;
            else if (name == "log") fn = f_log;
            else if (name == "sqrt") fn = f_sqrt;
            else fail("unknown name '" + name + "'");
            if (!accept('('))
                fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!accept(')'))
                fail("missing ')'");
            return make(Node::Call, {arg}, 0.0, fn);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(const std::string& text)
{
    Expression e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

double Expression::operator()(double v, double kappa) const
{
    return root_->eval(v, kappa);
}

} // namespace bianchi
