#include "fracheat/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "fracheat/error.hpp"

namespace fracheat {

namespace {

using Node = std::function<double(const double *, double)>;

class Parser {
public:
    Parser(const std::string &s, int dims) : s_(s), dims_(dims) {}

    Node parse()
    {
        Node n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string &what) const
    {
        std::ostringstream os;
        os << what << " at position " << pos_ << " in '" << s_ << "'";
        throw Error(ErrorKind::InvalidArgument, os.str());
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Node expr()
    {
        Node lhs = term();
        while (true) {
            if (eat('+')) {
                Node r = term();
                lhs = [lhs, r](const double *x, double t) { return lhs(x, t) + r(x, t); };
            } else if (eat('-')) {
                Node r = term();
                lhs = [lhs, r](const double *x, double t) { return lhs(x, t) - r(x, t); };
            } else {
                return lhs;
            }
        }
    }

    Node term()
    {
        Node lhs = unary();
        while (true) {
            if (eat('*')) {
                Node r = unary();
                lhs = [lhs, r](const double *x, double t) { return lhs(x, t) * r(x, t); };
            } else if (eat('/')) {
                Node r = unary();
                lhs = [lhs, r](const double *x, double t) { return lhs(x, t) / r(x, t); };
            } else {
                return lhs;
            }
        }
    }

    Node unary()
    {
        if (eat('-')) {
            Node a = unary();
            return [a](const double *x, double t) { return -a(x, t); };
        }
        if (eat('+')) return unary();
        return power();
    }

    Node power()
    {
        Node base = atom();
        if (eat('^')) {
            Node e = unary();
            return [base, e](const double *x, double t) { return std::pow(base(x, t), e(x, t)); };
        }
        return base;
    }

    Node atom()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            Node n = expr();
            if (!eat(')')) fail("missing ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return [v](const double *, double) { return v; };
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");
        std::size_t end = pos_;
        while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
        const std::string id = s_.substr(pos_, end - pos_);
        pos_ = end;
        if (eat('(')) {
            Node a = expr();
            if (!eat(')')) fail("missing ')'");
            return function(id, a);
        }
        if (id == "t") return [](const double *, double t) { return t; };
        if (id == "pi") return [](const double *, double) { return M_PI; };
        if (id == "r") {
            const int d = dims_;
            return [d](const double *x, double) {
                double r2 = 0.0;
                for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
                return std::sqrt(r2);
            };
        }
        int axis = -1;
        if (id == "x" && dims_ >= 1) axis = 0;
        else if (id.size() > 1 && id[0] == 'x' && std::all_of(id.begin() + 1, id.end(), ::isdigit)) axis = std::stoi(id.substr(1)) - 1;
        if (axis < 0 || axis >= dims_) fail("unknown variable '" + id + "'");
        return [axis](const double *x, double) { return x[axis]; };
    }

    Node function(const std::string &id, Node a)
    {
        double (*f)(double) = nullptr;
        if (id == "sin") f = [](double v) { return std::sin(v); };
        else if (id == "cos") f = [](double v) { return std::cos(v); };
        else if (id == "tan") f = [](double v) { return std::tan(v); };
        else if (id == "exp") f = [](double v) { return std::exp(v); };
        else if (id == "log") f = [](double v) { return std::log(v); };
        else if (id == "sqrt") f = [](double v) { return std::sqrt(v); };
        else if (id == "abs") f = [](double v) { return std::fabs(v); };
        else if (id == "step") f = [](double v) { return v >= 0.0 ? 1.0 : 0.0; };
        else if (id == "bump") f = [](double v) { return std::fabs(v) < 1.0 ? std::exp(-1.0 / (1.0 - v * v)) : 0.0; };
        else fail("unknown function '" + id + "'");
        return [f, a](const double *x, double t) { return f(a(x, t)); };
    }

    const std::string &s_;
    int dims_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expression(const std::string &src, int space_dim)
{
    Parser p(src, space_dim);
    return p.parse();
}

} // namespace fracheat
