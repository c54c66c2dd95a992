#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <random>

#include "fkit/defect.hpp"
#include "fkit/errors.hpp"
#include "fkit/spec_io.hpp"
#include "test_support.hpp"

using namespace fkit;

namespace {

FriedrichsSpec block_example() {
    return load_spec_json(nlohmann::json::parse(R"({
      "field": "real", "interval": [0.0, 1.0], "dimension": 2,
      "A": [["1", "0"], ["0", "1-x"]],
      "C": [["1", "0"], ["0", "0"]],
      "degeneracy": [{"block": 1, "endpoint": "right"}]
    })"));
}

CoefficientField scalar_field_of(const char* expr) {
    return CoefficientField(1, {{parse_expression(expr), make_number(0.0)}});
}

}  // namespace

TEST_CASE("deficiency indices of the scalar and block examples") {
    auto [dp1, dm1] = deficiency_indices(make_scalar_spec("1", "1", 0.0, 1.0));
    CHECK(dp1 == 1);
    CHECK(dm1 == 1);

    auto [dp2, dm2] = deficiency_indices(block_example());
    CHECK(dp2 == 2);
    CHECK(dm2 == 1);
}

TEST_CASE("non-degenerate systems have indices (n, n)") {
    std::mt19937_64 rng(5);
    for (int n : {1, 2, 3}) {
        FriedrichsSpec spec = fkit_test::random_spec(rng, n, ScalarField::real);
        auto [dp, dm] = deficiency_indices(spec);
        CHECK(dp == n);
        CHECK(dm == n);
        CHECK(dp + dm == 2 * n);  // sum rule
    }
}

TEST_CASE("invariance harness over scalar bounded parts") {
    FriedrichsSpec skeleton = make_scalar_spec("1", "1", 0.0, 1.0);
    std::vector<CoefficientField> samples = {
        scalar_field_of("1"),
        scalar_field_of("1+x"),
        scalar_field_of("2+sin(x)"),
    };
    // three seeded random strictly positive expressions
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 3; ++k) {
        double base = 1.2 + u01(rng);
        double amp = 0.8 * u01(rng);
        double freq = 1.0 + 2.0 * u01(rng);
        ExprPtr e = make_add(make_number(base),
                             fkit_test::lin_sin(amp, freq, 6.28 * u01(rng)));
        samples.push_back(CoefficientField(1, {{e, make_number(0.0)}}));
    }

    InvarianceVerdict v = invariance_harness(skeleton, samples);
    CHECK(v.pass);
    CHECK(v.table.size() == 6);
    for (const InvarianceRow& row : v.table) {
        CHECK(row.d_plus == 1);
        CHECK(row.d_minus == 1);
    }
}

TEST_CASE("invariance harness over a seeded 2x2 family") {
    std::mt19937_64 rng(17);
    FriedrichsSpec skeleton = fkit_test::random_spec(rng, 2, ScalarField::real);
    std::vector<CoefficientField> samples;
    for (int k = 0; k < 10; ++k)
        samples.push_back(fkit::add_fields(
            fkit_test::random_hermitian_field(rng, 2, 1.5, false, false),
            fkit_test::random_skew_field(rng, 2, false)));
    InvarianceVerdict v = invariance_harness(skeleton, samples);
    CHECK(v.pass);
    for (const InvarianceRow& row : v.table) {
        CHECK(row.d_plus == 2);
        CHECK(row.d_minus == 2);
    }
}

TEST_CASE("a sample without a strictly positive symmetric part is a precondition error") {
    FriedrichsSpec skeleton = make_scalar_spec("1", "1", 0.0, 1.0);
    std::vector<CoefficientField> samples = {scalar_field_of("1"), scalar_field_of("-1")};
    CHECK_THROWS_AS((void)invariance_harness(skeleton, samples), NotStrictlyPositive);
}

TEST_CASE("convexity path between admissible bounded parts") {
    FriedrichsSpec skeleton = make_scalar_spec("1", "1", 0.0, 1.0);
    CoefficientField c0 = scalar_field_of("1");
    CoefficientField c1 = scalar_field_of("2+sin(3*x)");
    std::vector<CoefficientField> path;
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0})
        path.push_back(fkit::add_fields(fkit::scale_field(c0, lambda),
                                        fkit::scale_field(c1, 1.0 - lambda)));
    InvarianceVerdict v = invariance_harness(skeleton, path);
    CHECK(v.pass);
    for (const InvarianceRow& row : v.table) CHECK(row.d_plus == 1);
}

TEST_CASE("singular block analysis for a = 1 - x") {
    ExprEntry a{parse_expression("1-x"), make_number(0.0)};
    ExprEntry c{make_number(0.0), make_number(0.0)};
    SingularBlockReport rep =
        analyze_singular_block(a, c, 1, Endpoint::right, 0.0, 1.0, 1e-10);

    CHECK(rep.t1_in_l2);         // kernel of (a u)' + u = 0 is u = 1
    CHECK_FALSE(rep.tt1_in_l2);  // kernel of -a u' + u = 0 is 1/(1-x)
    CHECK(std::abs(rep.t1_growth_exponent) < 0.05);
    CHECK(rep.tt1_growth_exponent == doctest::Approx(-1.0).epsilon(0.02));
    CHECK(rep.t1_partial_masses.size() == 20);

    // dyadic-mass oracle for the divergent direction: increments double
    const auto& m = rep.tt1_partial_masses;
    double r1 = (m[18] - m[17]) / (m[17] - m[16]);
    CHECK(r1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("no degeneracy means both directions are square integrable") {
    ExprEntry a{make_number(1.0), make_number(0.0)};
    ExprEntry c{make_number(1.0), make_number(0.0)};
    SingularBlockReport rep =
        analyze_singular_block(a, c, 0, Endpoint::right, 0.0, 1.0, 1e-10);
    CHECK(rep.t1_in_l2);
    CHECK(rep.tt1_in_l2);
}

TEST_CASE("borderline exponents are refused rather than guessed") {
    // u ~ (1-x)^(-1/4): in L2 but outside the geometric certificate
    ExprEntry a{parse_expression("1-x"), make_number(0.0)};
    ExprEntry c{make_number(-0.25), make_number(0.0)};
    CHECK_THROWS_AS(
        (void)analyze_singular_block(a, c, 0, Endpoint::right, 0.0, 1.0, 1e-10),
        UndecidableIntegrability);
}

TEST_CASE("left-endpoint degeneracy mirrors the right-endpoint analysis") {
    // a = x, c = 1: the T1 kernel x u' + u = 0 is u = 1/x (not in L2), while
    // the Tt1 direction -x u' + (1 - 1) u = 0 gives u = 1 (in L2)
    ExprEntry a{parse_expression("x"), make_number(0.0)};
    ExprEntry c{make_number(1.0), make_number(0.0)};
    SingularBlockReport rep = analyze_singular_block(a, c, 0, Endpoint::left, 0.0, 1.0, 1e-10);
    CHECK_FALSE(rep.t1_in_l2);
    CHECK(rep.tt1_in_l2);
    CHECK(rep.t1_growth_exponent == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("removing the degeneracy restores equal indices") {
    FriedrichsSpec spec = load_spec_json(nlohmann::json::parse(R"({
      "field": "real", "interval": [0.0, 1.0], "dimension": 2,
      "A": [["1", "0"], ["0", "1.01-x"]],
      "C": [["1", "0"], ["0", "0"]]
    })"));
    auto [dp, dm] = deficiency_indices(spec);
    CHECK(dp == 2);
    CHECK(dm == 2);
}
