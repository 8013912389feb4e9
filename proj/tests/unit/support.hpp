#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

// Recursive-descent evaluator for rendered expressions: + - * / ^, unary minus,
// sin cos exp sqrt, variables x and t. Written independently of the renderer.
class Expr {
public:
    Expr(std::string text, double x, double t) : s_(std::move(text)), x_(x), t_(t) {}

    double eval() {
        const double v = sum();
        skip();
        if (i_ != s_.size()) throw std::runtime_error("trailing input at " + std::to_string(i_));
        return v;
    }

private:
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    double sum() {
        double v = product();
        for (;;) {
            if (eat('+')) v += product();
            else if (eat('-')) v -= product();
            else return v;
        }
    }
    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) v /= unary();
            else return v;
        }
    }
    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    double power() {
        const double base = atom();
        if (eat('^')) return std::pow(base, unary());
        return base;
    }
    double atom() {
        skip();
        if (eat('(')) {
            const double v = sum();
            if (!eat(')')) throw std::runtime_error("missing )");
            return v;
        }
        if (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) {
            char* end = nullptr;
            const double v = std::strtod(s_.c_str() + i_, &end);
            i_ = static_cast<std::size_t>(end - s_.c_str());
            return v;
        }
        std::string name;
        while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) name += s_[i_++];
        if (name == "x") return x_;
        if (name == "t") return t_;
        if (!eat('(')) throw std::runtime_error("unknown token '" + name + "'");
        const double a = sum();
        if (!eat(')')) throw std::runtime_error("missing ) after " + name);
        if (name == "sin") return std::sin(a);
        if (name == "cos") return std::cos(a);
        if (name == "exp") return std::exp(a);
        if (name == "sqrt") return std::sqrt(a);
        throw std::runtime_error("unknown function '" + name + "'");
    }

    std::string s_;
    double x_;
    double t_;
    std::size_t i_ = 0;
};

inline double eval_expr(const std::string& text, double x, double t) {
    return Expr(text, x, t).eval();
}

// Gauss-Jordan inverse with partial pivoting on a dense row-major matrix.
inline std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        }
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        const double d = a[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] /= d;
            inv[c][k] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

} // namespace testsupport
