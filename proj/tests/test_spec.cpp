#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <random>

#include "fkit/errors.hpp"
#include "fkit/spec.hpp"
#include "fkit/spec_io.hpp"
#include "test_support.hpp"

using namespace fkit;

namespace {

FriedrichsSpec from_json(const char* text) { return load_spec_json(nlohmann::json::parse(text)); }

const char* kBlockExample = R"({
  "field": "real",
  "interval": [0.0, 1.0],
  "dimension": 2,
  "A": [["1", "0"], ["0", "1-x"]],
  "C": [["1", "0"], ["0", "0"]],
  "degeneracy": [{"block": 1, "endpoint": "right"}]
})";

}  // namespace

TEST_CASE("constant beta spec: mu = lambda = 1, S = 1, no skew part") {
    FriedrichsSpec spec = make_scalar_spec("1", "1", 0.0, 1.0);
    PartsDecomposition parts = validate_spec(spec);
    CHECK(parts.mu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(parts.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(parts.mu_margin == doctest::Approx(0.0));
    for (double x : {0.0, 0.25, 0.77, 1.0}) {
        CHECK(std::abs(parts.S.value(x)(0, 0) - 1.0) < 1e-15);
        CHECK(std::abs(parts.skew_bounded.value(x)(0, 0)) < 1e-15);
    }
}

TEST_CASE("negative symmetric part is rejected") {
    FriedrichsSpec spec = make_scalar_spec("1", "-1", 0.0, 1.0);
    CHECK_THROWS_AS((void)validate_spec(spec), NotStrictlyPositive);
}

TEST_CASE("split_parts is the post-state of validate_spec") {
    FriedrichsSpec spec = make_scalar_spec("1", "2+sin(x)", 0.0, 1.0);
    PartsDecomposition a = validate_spec(spec);
    PartsDecomposition b = split_parts(spec);
    CHECK(a.mu == b.mu);
    CHECK(a.lambda == b.lambda);
    for (double x : {0.1, 0.9})
        CHECK((a.S.value(x) - b.S.value(x)).norm() == 0.0);
}

TEST_CASE("degenerate block example validates with mu from the eigenvalue scan") {
    FriedrichsSpec spec = from_json(kBlockExample);
    PartsDecomposition parts = validate_spec(spec);

    // independent oracle: min over a 10^4 grid of the smallest eigenvalue of
    // (C(x) + C(x)^* - A'(x))/2, assembled from raw evaluations
    double mu_oracle = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10000; ++k) {
        double x = k / 10000.0;
        Eigen::MatrixXcd c = spec.C.value(x);
        Eigen::MatrixXcd da = spec.A.derivative().value(x);
        Eigen::MatrixXcd s = 0.5 * (c + c.adjoint() - da);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s, Eigen::EigenvaluesOnly);
        mu_oracle = std::min(mu_oracle, eig.eigenvalues().minCoeff());
    }
    CHECK(mu_oracle == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(parts.mu == doctest::Approx(mu_oracle).epsilon(1e-9));
    CHECK(parts.lambda == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("split identity: C = skew_bounded + S pointwise") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int n : {1, 2, 3}) {
        for (ScalarField field : {ScalarField::real, ScalarField::cplx}) {
            FriedrichsSpec spec = fkit_test::random_spec(rng, n, field);
            PartsDecomposition parts = validate_spec(spec);
            for (int t = 0; t < 100; ++t) {
                double x = ux(rng);
                Eigen::VectorXcd u = fkit_test::random_matrix(rng, n, 1,
                                                              field == ScalarField::cplx);
                Eigen::VectorXcd lhs = spec.C.value(x) * u;
                Eigen::VectorXcd rhs =
                    parts.skew_bounded.value(x) * u + parts.S.value(x) * u;
                CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + u.norm()));
            }
        }
    }
}

TEST_CASE("splitting is a pure function of coefficient values") {
    FriedrichsSpec s1 = make_scalar_spec("1", "2", 0.0, 1.0);
    FriedrichsSpec s2 = make_scalar_spec("1", "1+1", 0.0, 1.0);
    FriedrichsSpec s3 = make_scalar_spec("1", "1+x+x", 0.0, 1.0);
    FriedrichsSpec s4 = make_scalar_spec("1", "1+2*x", 0.0, 1.0);
    PartsDecomposition p1 = validate_spec(s1), p2 = validate_spec(s2);
    PartsDecomposition p3 = validate_spec(s3), p4 = validate_spec(s4);
    for (int k = 0; k <= 100; ++k) {
        double x = 0.001 + 0.998 * k / 100.0;
        CHECK(std::abs(p1.S.value(x)(0, 0) - p2.S.value(x)(0, 0)) <= 1e-12);
        CHECK(std::abs(p3.S.value(x)(0, 0) - p4.S.value(x)(0, 0)) <= 1e-12);
    }
}

TEST_CASE("S is Hermitian to machine precision as constructed") {
    std::mt19937_64 rng(11);
    FriedrichsSpec spec = fkit_test::random_spec(rng, 3, ScalarField::cplx);
    PartsDecomposition parts = validate_spec(spec);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Eigen::MatrixXcd s = parts.S.value(ux(rng));
        CHECK((s - s.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("purely skew bounded part has no symmetric piece") {
    // C = i on the complex field: S vanishes identically
    FriedrichsSpec spec;
    spec.field = ScalarField::cplx;
    spec.a = 0.0;
    spec.b = 1.0;
    spec.n = 1;
    spec.A = CoefficientField(1, {{make_number(1.0), make_number(0.0)}});
    spec.C = CoefficientField(1, {{make_number(0.0), make_number(1.0)}});
    CHECK_THROWS_AS((void)validate_spec(spec), NotStrictlyPositive);
}

TEST_CASE("non-Hermitian A is rejected") {
    FriedrichsSpec spec = from_json(R"({
      "field": "real", "interval": [0.0, 1.0], "dimension": 2,
      "A": [["1", "x"], ["0", "1"]],
      "C": [["1", "0"], ["0", "1"]]
    })");
    CHECK_THROWS_AS((void)validate_spec(spec), NotHermitian);
}

TEST_CASE("unflagged degeneracy is rejected") {
    CHECK_THROWS_AS((void)validate_spec(make_scalar_spec("x-0.5", "1", 0.0, 1.0)),
                    DegenerateOutsideFlags);
    CHECK_THROWS_AS((void)validate_spec(make_scalar_spec("1-x", "1", 0.0, 1.0)),
                    DegenerateOutsideFlags);
}

TEST_CASE("flag on a non-vanishing block is rejected") {
    FriedrichsSpec spec = make_scalar_spec("1", "1", 0.0, 1.0);
    spec.degeneracy.push_back({0, Endpoint::right});
    CHECK_THROWS_AS((void)validate_spec(spec), ValidationError);
}

TEST_CASE("degenerate block coupled to the rest is rejected") {
    FriedrichsSpec spec = from_json(R"({
      "field": "real", "interval": [0.0, 1.0], "dimension": 2,
      "A": [["1", "0"], ["0", "1-x"]],
      "C": [["1", "1"], ["1", "0"]],
      "degeneracy": [{"block": 1, "endpoint": "right"}]
    })");
    CHECK_THROWS_AS((void)validate_spec(spec), ValidationError);
}

TEST_CASE("real field with imaginary coefficients is rejected") {
    FriedrichsSpec spec;
    spec.field = ScalarField::real;
    spec.a = 0.0;
    spec.b = 1.0;
    spec.n = 1;
    spec.A = CoefficientField(1, {{make_number(1.0), make_number(0.0)}});
    spec.C = CoefficientField(1, {{make_number(1.0), make_number(0.5)}});
    CHECK_THROWS_AS((void)validate_spec(spec), ValidationError);
}

TEST_CASE("kinked A fails the smoothness probe") {
    CHECK_THROWS_AS((void)validate_spec(make_scalar_spec("abs(x-0.5)+1", "5", 0.0, 1.0)),
                    ValidationError);
}

TEST_CASE("random specs validate with healthy margins") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        int n = 1 + static_cast<int>(rng() % 3);
        FriedrichsSpec spec =
            fkit_test::random_spec(rng, n, t % 2 ? ScalarField::cplx : ScalarField::real);
        PartsDecomposition parts = validate_spec(spec);
        CHECK(parts.mu > 0.5);
        CHECK(parts.lambda < 10.0);
    }
}
