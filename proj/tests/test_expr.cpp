#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fkit/errors.hpp"
#include "fkit/expr.hpp"

using namespace fkit;

namespace {

double eval_re(const char* src, double x) { return eval(parse_expression(src), x).real(); }

// independent exponential oracle: plain Taylor series, no <cmath>
double exp_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 30; ++k) {
        term *= x / k;
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_CASE("evaluation against the series oracle") {
    CHECK(std::abs(eval_re("exp(-x)", 1.0) - exp_series(-1.0)) < 1e-12);
    CHECK(eval_re("exp(-x)", 1.0) == doctest::Approx(0.3678794412).epsilon(1e-9));
    CHECK(eval_re("x", 0.0) == 0.0);
    CHECK(eval_re("1-x", 1.0) == 0.0);
}

TEST_CASE("precedence and associativity") {
    CHECK(eval_re("2^3^2", 0.0) == 512.0);      // right-assoc
    CHECK(eval_re("-x^2", 3.0) == -9.0);        // ^ binds tighter than unary -
    CHECK(eval_re("-2^2", 0.0) == -4.0);
    CHECK(eval_re("2*-3", 0.0) == -6.0);
    CHECK(eval_re("1-2-3", 0.0) == -4.0);       // left-assoc
    CHECK(eval_re("6/3/2", 0.0) == 1.0);
    CHECK(eval_re("2^-1", 0.0) == 0.5);
    CHECK(eval_re("(1-x)*(1+x)", 0.5) == doctest::Approx(0.75));
    CHECK(eval_re("1e-2", 0.0) == 0.01);
    CHECK(eval_re("2.5e3", 0.0) == 2500.0);
}

TEST_CASE("complex values") {
    auto v = eval(parse_expression("i*i"), 0.0);
    CHECK(v.real() == doctest::Approx(-1.0));
    CHECK(v.imag() == doctest::Approx(0.0));
    auto w = eval(parse_expression("(1+i)*(1-i)"), 0.0);
    CHECK(w.real() == doctest::Approx(2.0));
    CHECK(std::abs(w.imag()) < 1e-15);
    auto e = eval(parse_expression("exp(i*x)"), 3.14159265358979323846);
    CHECK(e.real() == doctest::Approx(-1.0));
    CHECK(std::abs(e.imag()) < 1e-12);
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS((void)parse_expression(""), SyntaxError);
    CHECK_THROWS_AS((void)parse_expression("2+*3"), SyntaxError);
    CHECK_THROWS_AS((void)parse_expression("sin x"), SyntaxError);
    CHECK_THROWS_AS((void)parse_expression("(1+x"), SyntaxError);
    CHECK_THROWS_AS((void)parse_expression("1+x)"), SyntaxError);
    CHECK_THROWS_AS((void)parse_expression("foo(x)"), UnknownIdentifier);
    CHECK_THROWS_AS((void)parse_expression("y+1"), UnknownIdentifier);
    CHECK_THROWS_AS((void)parse_expression("exp(x,1)"), ArityError);
    try {
        (void)parse_expression("1+ @");
    } catch (const SyntaxError& e) {
        CHECK(e.offset == 3);
    }
}

namespace {

ExprPtr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    std::uniform_int_distribution<int> fpick(0, 5);
    static const double literals[] = {0.0, 1.0, 2.0, 0.5, 3.25, 0.001, 7.0, 1e10};
    switch (pick(rng)) {
        case 0: return make_variable();
        case 1: return make_number(literals[rng() % 8]);
        case 2: return make_imag_unit();
        case 3: return std::make_shared<const ExprNode>(ExprNode{
            ExprKind::add, 0, FuncId::exp, random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
        case 4: return std::make_shared<const ExprNode>(ExprNode{
            ExprKind::sub, 0, FuncId::exp, random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
        case 5: return std::make_shared<const ExprNode>(ExprNode{
            ExprKind::mul, 0, FuncId::exp, random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
        case 6: return std::make_shared<const ExprNode>(ExprNode{
            ExprKind::div, 0, FuncId::exp, random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
        case 7: return std::make_shared<const ExprNode>(ExprNode{
            ExprKind::pow, 0, FuncId::exp, random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
        case 8: return std::make_shared<const ExprNode>(
            ExprNode{ExprKind::neg, 0, FuncId::exp, random_tree(rng, depth - 1), nullptr});
        default:
            return std::make_shared<const ExprNode>(ExprNode{
                ExprKind::call, 0, static_cast<FuncId>(fpick(rng)), random_tree(rng, depth - 1),
                nullptr});
    }
}

}  // namespace

TEST_CASE("print/parse round trip is the identity on trees") {
    std::mt19937_64 rng(20240811);
    for (int t = 0; t < 500; ++t) {
        ExprPtr tree = random_tree(rng, 5);
        std::string printed = print_expression(tree);
        ExprPtr back = parse_expression(printed);
        CHECK(expr_equal(tree, back));
        if (!expr_equal(tree, back)) {
            MESSAGE("printed form: ", printed);
            break;
        }
    }
}

TEST_CASE("symbolic derivative agrees with central differences") {
    const char* exprs[] = {
        "x^3-2*x+1",
        "exp(-x)",
        "exp(x^2/10)",
        "sin(3*x)*cos(x)",
        "1/(2+x)",
        "sqrt(2+x)",
        "log(2+x)",
        "abs(1+x)",
        "x^2.5",
        "(1+x)^x",
        "sin(x)/(2+cos(x))",
    };
    const double xs[] = {0.1, 0.5, 1.3};
    for (const char* src : exprs) {
        ExprPtr f = parse_expression(src);
        ExprPtr df = differentiate(f);
        for (double x : xs) {
            double h = 1e-6;
            double fd = (eval(f, x + h).real() - eval(f, x - h).real()) / (2 * h);
            double sym = eval(df, x).real();
            CHECK(sym == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("derivative values for the coefficient workhorses") {
    ExprPtr f = parse_expression("exp(-x)");
    CHECK(eval(differentiate(f), 1.0).real() == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
    ExprPtr g = parse_expression("1-x");
    CHECK(eval(differentiate(g), 0.3).real() == doctest::Approx(-1.0));
    ExprPtr h = parse_expression("x^2");
    CHECK(eval(differentiate(h), 4.0).real() == doctest::Approx(8.0));
}
