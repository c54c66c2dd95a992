#ifndef FKIT_EXPR_HPP
#define FKIT_EXPR_HPP

#include <complex>
#include <memory>
#include <string>

namespace fkit {

// Closed-form expressions in one real variable x, with complex values.
// Trees are immutable; nodes are shared freely across threads.

enum class ExprKind { number, variable, imag_unit, add, sub, mul, div, pow, neg, call };

enum class FuncId { exp, log, sin, cos, sqrt, abs };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    double number = 0.0;           // ExprKind::number
    FuncId func = FuncId::exp;     // ExprKind::call
    ExprPtr a;                     // left operand / unary operand / call argument
    ExprPtr b;                     // right operand
};

// Node constructors. The arithmetic ones fold the obvious identities
// (0+t, 1*t, t^1, ...) so that symbolic derivatives stay readable.
ExprPtr make_number(double v);
ExprPtr make_variable();
ExprPtr make_imag_unit();
ExprPtr make_add(ExprPtr l, ExprPtr r);
ExprPtr make_sub(ExprPtr l, ExprPtr r);
ExprPtr make_mul(ExprPtr l, ExprPtr r);
ExprPtr make_div(ExprPtr l, ExprPtr r);
ExprPtr make_pow(ExprPtr base, ExprPtr exponent);
ExprPtr make_neg(ExprPtr t);
ExprPtr make_call(FuncId f, ExprPtr arg);

// Standard precedence grammar: ^ (right-assoc) > unary - > *,/ > +,-.
// Identifiers: x, i, exp, log, sin, cos, sqrt, abs.
// Throws SyntaxError / UnknownIdentifier / ArityError with byte offsets.
ExprPtr parse_expression(const std::string& src);

// Canonical rendering; parse_expression(print_expression(t)) rebuilds t exactly.
std::string print_expression(const ExprPtr& t);

std::complex<double> eval(const ExprPtr& t, double x);

// d/dx by structural differentiation; exact for every representable tree.
ExprPtr differentiate(const ExprPtr& t);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

}  // namespace fkit

#endif
