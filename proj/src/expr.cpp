#include "fkit/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "fkit/errors.hpp"

namespace fkit {

namespace {

bool is_number(const ExprPtr& t, double v) {
    return t->kind == ExprKind::number && t->number == v;
}

ExprPtr node(ExprKind k, ExprPtr a = nullptr, ExprPtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

ExprPtr raw_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::number;
    n->number = v;
    return n;
}

}  // namespace

// Literals are kept nonnegative (a negative value becomes neg(literal)), so
// every tree prints to a string that re-parses to the identical tree.
ExprPtr make_number(double v) {
    if (v < 0.0) return node(ExprKind::neg, raw_number(-v));
    if (v == 0.0) v = 0.0;  // normalise -0.0
    return raw_number(v);
}

ExprPtr make_variable() { return node(ExprKind::variable); }
ExprPtr make_imag_unit() { return node(ExprKind::imag_unit); }

ExprPtr make_add(ExprPtr l, ExprPtr r) {
    if (is_number(l, 0.0)) return r;
    if (is_number(r, 0.0)) return l;
    if (l->kind == ExprKind::number && r->kind == ExprKind::number)
        return make_number(l->number + r->number);
    return node(ExprKind::add, std::move(l), std::move(r));
}

ExprPtr make_sub(ExprPtr l, ExprPtr r) {
    if (is_number(r, 0.0)) return l;
    if (l->kind == ExprKind::number && r->kind == ExprKind::number)
        return make_number(l->number - r->number);
    if (is_number(l, 0.0)) return make_neg(std::move(r));
    return node(ExprKind::sub, std::move(l), std::move(r));
}

ExprPtr make_mul(ExprPtr l, ExprPtr r) {
    if (is_number(l, 0.0) || is_number(r, 0.0)) return make_number(0.0);
    if (is_number(l, 1.0)) return r;
    if (is_number(r, 1.0)) return l;
    if (l->kind == ExprKind::number && r->kind == ExprKind::number)
        return make_number(l->number * r->number);
    return node(ExprKind::mul, std::move(l), std::move(r));
}

ExprPtr make_div(ExprPtr l, ExprPtr r) {
    if (is_number(l, 0.0)) return make_number(0.0);
    if (is_number(r, 1.0)) return l;
    return node(ExprKind::div, std::move(l), std::move(r));
}

ExprPtr make_pow(ExprPtr base, ExprPtr exponent) {
    if (is_number(exponent, 1.0)) return base;
    if (is_number(exponent, 0.0)) return make_number(1.0);
    return node(ExprKind::pow, std::move(base), std::move(exponent));
}

ExprPtr make_neg(ExprPtr t) {
    if (t->kind == ExprKind::number && t->number != 0.0) return node(ExprKind::neg, std::move(t));
    if (t->kind == ExprKind::number) return t;  // -0 stays 0
    if (t->kind == ExprKind::neg) return t->a;
    return node(ExprKind::neg, std::move(t));
}

ExprPtr make_call(FuncId f, ExprPtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::call;
    n->func = f;
    n->a = std::move(arg);
    return n;
}

// ---------------------------------------------------------------- parsing --

namespace {

struct Parser {
    const std::string& src;
    std::size_t pos = 0;

    explicit Parser(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            throw SyntaxError(std::string("expected '") + c + "'", pos);
    }

    ExprPtr parse() {
        skip_ws();
        if (pos == src.size()) throw SyntaxError("empty expression", 0);
        ExprPtr e = expr();
        skip_ws();
        if (pos != src.size()) throw SyntaxError("trailing input", pos);
        return e;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (accept('+'))
                e = node(ExprKind::add, e, term());
            else if (accept('-'))
                e = node(ExprKind::sub, e, term());
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            if (accept('*'))
                e = node(ExprKind::mul, e, unary());
            else if (accept('/'))
                e = node(ExprKind::div, e, unary());
            else
                return e;
        }
    }

    ExprPtr unary() {
        if (accept('-')) return node(ExprKind::neg, unary());
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (accept('^')) return node(ExprKind::pow, base, unary());
        return base;
    }

    ExprPtr primary() {
        char c = peek();
        if (c == '(') {
            ++pos;
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (c == '\0') throw SyntaxError("unexpected end of input", pos);
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
    }

    ExprPtr number() {
        std::size_t start = pos;
        while (pos < src.size() && (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.'))
            ++pos;
        // optional exponent part
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t mark = pos++;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
            if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            } else {
                pos = mark;  // 'e' belonged to something else; not a valid exponent
            }
        }
        double v = 0.0;
        auto res = std::from_chars(src.data() + start, src.data() + pos, v);
        if (res.ec != std::errc() || res.ptr != src.data() + pos)
            throw SyntaxError("malformed number", start);
        return make_number(v);
    }

    ExprPtr identifier() {
        std::size_t start = pos;
        while (pos < src.size() && std::isalnum(static_cast<unsigned char>(src[pos]))) ++pos;
        std::string name = src.substr(start, pos - start);
        if (name == "x") return make_variable();
        if (name == "i") return make_imag_unit();

        static const std::array<std::pair<const char*, FuncId>, 6> funcs = {{
            {"exp", FuncId::exp}, {"log", FuncId::log}, {"sin", FuncId::sin},
            {"cos", FuncId::cos}, {"sqrt", FuncId::sqrt}, {"abs", FuncId::abs},
        }};
        for (const auto& [fname, fid] : funcs) {
            if (name == fname) {
                expect('(');
                ExprPtr arg = expr();
                if (peek() == ',') throw ArityError(name, pos);
                expect(')');
                return make_call(fid, arg);
            }
        }
        throw UnknownIdentifier(name, start);
    }
};

}  // namespace

ExprPtr parse_expression(const std::string& src) {
    if (src.empty()) throw SyntaxError("empty expression", 0);
    Parser p(src);
    return p.parse();
}

// --------------------------------------------------------------- printing --

namespace {

// precedence levels: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5
int prec(const ExprNode& n) {
    switch (n.kind) {
        case ExprKind::add:
        case ExprKind::sub: return 1;
        case ExprKind::mul:
        case ExprKind::div: return 2;
        case ExprKind::neg: return 3;
        case ExprKind::pow: return 4;
        default: return 5;
    }
}

std::string print_number(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void print_rec(const ExprPtr& t, std::string& out);

// Children are parenthesised when their precedence is too low to re-parse in
// place, including the non-associative side at equal precedence.
void print_child(const ExprPtr& child, int parent_prec, bool tight_side, std::string& out) {
    int cp = prec(*child);
    bool parens = cp < parent_prec || (tight_side && cp == parent_prec);
    if (parens) out += '(';
    print_rec(child, out);
    if (parens) out += ')';
}

const char* func_name(FuncId f) {
    switch (f) {
        case FuncId::exp: return "exp";
        case FuncId::log: return "log";
        case FuncId::sin: return "sin";
        case FuncId::cos: return "cos";
        case FuncId::sqrt: return "sqrt";
        case FuncId::abs: return "abs";
    }
    return "?";
}

void print_rec(const ExprPtr& t, std::string& out) {
    switch (t->kind) {
        case ExprKind::number:
            out += print_number(t->number);
            return;
        case ExprKind::variable: out += 'x'; return;
        case ExprKind::imag_unit: out += 'i'; return;
        case ExprKind::add:
            print_child(t->a, 1, false, out);
            out += '+';
            print_child(t->b, 1, true, out);
            return;
        case ExprKind::sub:
            print_child(t->a, 1, false, out);
            out += '-';
            print_child(t->b, 1, true, out);
            return;
        case ExprKind::mul:
            print_child(t->a, 2, false, out);
            out += '*';
            print_child(t->b, 2, true, out);
            return;
        case ExprKind::div:
            print_child(t->a, 2, false, out);
            out += '/';
            print_child(t->b, 2, true, out);
            return;
        case ExprKind::neg:
            out += '-';
            print_child(t->a, 3, false, out);
            return;
        case ExprKind::pow:
            print_child(t->a, 4, true, out);  // base is primary-level: (x^2)^3 needs parens
            out += '^';
            print_child(t->b, 3, false, out);  // exponent re-parses as unary
            return;
        case ExprKind::call:
            out += func_name(t->func);
            out += '(';
            print_rec(t->a, out);
            out += ')';
            return;
    }
}

}  // namespace

std::string print_expression(const ExprPtr& t) {
    std::string out;
    print_rec(t, out);
    return out;
}

// ------------------------------------------------------------- evaluation --

namespace {

using cplx = std::complex<double>;

bool is_real(const cplx& z) { return z.imag() == 0.0; }

// std::pow on complex arguments picks up ~1e-16 spurious imaginary parts for
// plainly real cases like (-2)^2; keep real powers on the real path.
cplx pow_value(const cplx& base, const cplx& expo) {
    if (is_real(base) && is_real(expo)) {
        double b = base.real(), e = expo.real();
        if (b > 0.0 || e == std::rint(e)) return cplx(std::pow(b, e), 0.0);
    }
    return std::pow(base, expo);
}

}  // namespace

std::complex<double> eval(const ExprPtr& t, double x) {
    switch (t->kind) {
        case ExprKind::number: return cplx(t->number, 0.0);
        case ExprKind::variable: return cplx(x, 0.0);
        case ExprKind::imag_unit: return cplx(0.0, 1.0);
        case ExprKind::add: return eval(t->a, x) + eval(t->b, x);
        case ExprKind::sub: return eval(t->a, x) - eval(t->b, x);
        case ExprKind::mul: return eval(t->a, x) * eval(t->b, x);
        case ExprKind::div: return eval(t->a, x) / eval(t->b, x);
        case ExprKind::pow: return pow_value(eval(t->a, x), eval(t->b, x));
        case ExprKind::neg: return -eval(t->a, x);
        case ExprKind::call: {
            cplx v = eval(t->a, x);
            switch (t->func) {
                case FuncId::exp: return std::exp(v);
                case FuncId::log: return is_real(v) && v.real() > 0.0
                                             ? cplx(std::log(v.real()), 0.0)
                                             : std::log(v);
                case FuncId::sin: return std::sin(v);
                case FuncId::cos: return std::cos(v);
                case FuncId::sqrt: return is_real(v) && v.real() >= 0.0
                                              ? cplx(std::sqrt(v.real()), 0.0)
                                              : std::sqrt(v);
                case FuncId::abs: return cplx(std::abs(v), 0.0);
            }
            return cplx(0.0, 0.0);
        }
    }
    return cplx(0.0, 0.0);
}

// --------------------------------------------------------- differentiation --

ExprPtr differentiate(const ExprPtr& t) {
    switch (t->kind) {
        case ExprKind::number:
        case ExprKind::imag_unit: return make_number(0.0);
        case ExprKind::variable: return make_number(1.0);
        case ExprKind::add: return make_add(differentiate(t->a), differentiate(t->b));
        case ExprKind::sub: return make_sub(differentiate(t->a), differentiate(t->b));
        case ExprKind::mul:
            return make_add(make_mul(differentiate(t->a), t->b),
                            make_mul(t->a, differentiate(t->b)));
        case ExprKind::div:
            // (f/g)' = f'/g - f g'/g^2
            return make_sub(make_div(differentiate(t->a), t->b),
                            make_div(make_mul(t->a, differentiate(t->b)),
                                     make_pow(t->b, make_number(2.0))));
        case ExprKind::neg: return make_neg(differentiate(t->a));
        case ExprKind::pow: {
            const ExprPtr& f = t->a;
            const ExprPtr& g = t->b;
            if (g->kind == ExprKind::number) {
                // g f^(g-1) f'
                return make_mul(make_mul(g, make_pow(f, make_number(g->number - 1.0))),
                                differentiate(f));
            }
            // f^g (g' log f + g f'/f)
            return make_mul(t, make_add(make_mul(differentiate(g), make_call(FuncId::log, f)),
                                        make_div(make_mul(g, differentiate(f)), f)));
        }
        case ExprKind::call: {
            const ExprPtr& f = t->a;
            ExprPtr df = differentiate(f);
            switch (t->func) {
                case FuncId::exp: return make_mul(t, df);
                case FuncId::log: return make_div(df, f);
                case FuncId::sin: return make_mul(make_call(FuncId::cos, f), df);
                case FuncId::cos: return make_neg(make_mul(make_call(FuncId::sin, f), df));
                case FuncId::sqrt:
                    return make_div(df, make_mul(make_number(2.0), t));
                case FuncId::abs:
                    // sign(f) f', written f/|f| * f'; exact for real f away from 0
                    return make_mul(make_div(f, t), df);
            }
            return make_number(0.0);
        }
    }
    return make_number(0.0);
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::number:
            return a->number == b->number ||
                   (std::isnan(a->number) && std::isnan(b->number));
        case ExprKind::variable:
        case ExprKind::imag_unit: return true;
        case ExprKind::neg: return expr_equal(a->a, b->a);
        case ExprKind::call: return a->func == b->func && expr_equal(a->a, b->a);
        default: return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    }
}

}  // namespace fkit
