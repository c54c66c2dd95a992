#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <random>

#include "fkit/errors.hpp"
#include "fkit/spec_io.hpp"
#include "fkit/trace_space.hpp"
#include "test_support.hpp"

using namespace fkit;

namespace {

FriedrichsSpec beta1() { return make_scalar_spec("1", "1", 0.0, 1.0); }

FriedrichsSpec block_example() {
    return load_spec_json(nlohmann::json::parse(R"({
      "field": "real", "interval": [0.0, 1.0], "dimension": 2,
      "A": [["1", "0"], ["0", "1-x"]],
      "C": [["1", "0"], ["0", "0"]],
      "degeneracy": [{"block": 1, "endpoint": "right"}]
    })"));
}

TraceSubspace valpha(double a, const TraceForm& tf) { return subspace_from_alpha(a, false, tf); }

}  // namespace

TEST_CASE("trace form of the scalar system is diag(-1, 1)") {
    TraceForm tf = build_trace_form(beta1());
    CHECK(tf.eff_dim() == 2);
    CHECK(std::abs(tf.Q(0, 0) - std::complex<double>(-1.0, 0.0)) == 0.0);
    CHECK(std::abs(tf.Q(1, 1) - std::complex<double>(1.0, 0.0)) == 0.0);
    CHECK(std::abs(tf.Q(0, 1)) == 0.0);
    auto [pos, neg] = tf.signature();
    CHECK(pos == 1);
    CHECK(neg == 1);
}

TEST_CASE("blockwise trace form for constant identity A") {
    std::mt19937_64 rng(3);
    FriedrichsSpec spec = fkit_test::random_spec(rng, 2, ScalarField::real);
    spec.A = CoefficientField::constant_identity(2);
    TraceForm tf = build_trace_form(spec);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
    expected.diagonal() << -1.0, -1.0, 1.0, 1.0;
    CHECK((tf.Q - expected).norm() == 0.0);
}

TEST_CASE("degenerate block loses its right trace coordinate") {
    TraceForm tf = build_trace_form(block_example());
    CHECK(tf.eff_dim() == 3);
    CHECK(tf.kept == std::vector<int>{0, 1, 2});
    auto [pos, neg] = tf.signature();
    CHECK(pos == 1);
    CHECK(neg == 2);
}

TEST_CASE("signature is (n, n) for seeded non-degenerate specs") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 8; ++t) {
        int n = 1 + static_cast<int>(rng() % 3);
        FriedrichsSpec spec =
            fkit_test::random_spec(rng, n, t % 2 ? ScalarField::cplx : ScalarField::real);
        auto [pos, neg] = build_trace_form(spec).signature();
        CHECK(pos == n);
        CHECK(neg == n);
    }
}

TEST_CASE("kernel traces of the constant-beta system") {
    FriedrichsSpec spec = beta1();
    TraceForm tf = build_trace_form(spec);
    KernelBases kb = kernel_traces(spec, tf);
    CHECK(kb.d_plus() == 1);
    CHECK(kb.d_minus() == 1);

    Eigen::Vector2cd k_expected(1.0, std::exp(-1.0));
    Eigen::Vector2cd kt_expected(1.0, std::exp(1.0));
    CHECK(subspace_distance(kb.K, TraceSubspace::from_span(k_expected)) < 1e-9);
    CHECK(subspace_distance(kb.Kt, TraceSubspace::from_span(kt_expected)) < 1e-9);
}

TEST_CASE("block example has indices (2, 1)") {
    FriedrichsSpec spec = block_example();
    TraceForm tf = build_trace_form(spec);
    KernelBases kb = kernel_traces(spec, tf);
    CHECK(kb.d_plus() == 2);
    CHECK(kb.d_minus() == 1);
    CHECK(kb.d_plus() + kb.d_minus() == tf.eff_dim());
}

TEST_CASE("kernel decomposition: orthogonality and definiteness") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 6; ++t) {
        int n = 1 + static_cast<int>(rng() % 3);
        FriedrichsSpec spec =
            fkit_test::random_spec(rng, n, t % 2 ? ScalarField::cplx : ScalarField::real);
        TraceForm tf = build_trace_form(spec);
        KernelBases kb = kernel_traces(spec, tf);
        CHECK(kb.d_plus() == n);
        CHECK(kb.d_minus() == n);

        double cross = (kb.Kt.basis.adjoint() * tf.Q * kb.K.basis).cwiseAbs().maxCoeff();
        CHECK(cross <= 1e-8 * tf.norm());

        Eigen::MatrixXcd neg_gram = -(kb.K.basis.adjoint() * tf.Q * kb.K.basis);
        Eigen::MatrixXcd pos_gram = kb.Kt.basis.adjoint() * tf.Q * kb.Kt.basis;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> en(neg_gram, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ep(pos_gram, Eigen::EigenvaluesOnly);
        CHECK(en.eigenvalues().minCoeff() > 0.0);
        CHECK(ep.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("orthogonal complements: trivial cases and the alpha pairing") {
    FriedrichsSpec spec = beta1();
    TraceForm tf = build_trace_form(spec);

    TraceSubspace zero = TraceSubspace::zero(2);
    TraceSubspace full = TraceSubspace::full(2);
    CHECK(ortho_complement(zero, tf).dim() == 2);
    CHECK(ortho_complement(full, tf).dim() == 0);

    for (double alpha : {-2.0, -1.0, -0.5, 0.3, 1.0, 2.0}) {
        TraceSubspace v = valpha(alpha, tf);
        TraceSubspace vp = ortho_complement(v, tf);
        CHECK(subspace_distance(vp, valpha(1.0 / alpha, tf)) < 1e-12);
    }
    // the pair (0, inf)
    TraceSubspace v0 = valpha(0.0, tf);
    TraceSubspace vinf = subspace_from_alpha(0.0, true, tf);
    CHECK(subspace_distance(ortho_complement(v0, tf), vinf) < 1e-12);
    CHECK(subspace_distance(ortho_complement(vinf, tf), v0) < 1e-12);
}

TEST_CASE("double complement and dimension count on random subspaces") {
    std::mt19937_64 rng(41);
    FriedrichsSpec spec = fkit_test::random_spec(rng, 3, ScalarField::cplx);
    TraceForm tf = build_trace_form(spec);
    for (int t = 0; t < 20; ++t) {
        int dim = static_cast<int>(rng() % 7);
        TraceSubspace v =
            TraceSubspace::from_span(fkit_test::random_matrix(rng, 6, dim, true));
        TraceSubspace vp = ortho_complement(v, tf);
        CHECK(v.dim() + vp.dim() == tf.eff_dim());
        TraceSubspace vpp = ortho_complement(vp, tf);
        CHECK(subspace_distance(v, vpp) < 1e-10);
    }
}

TEST_CASE("cone classification of the alpha family") {
    TraceForm tf = build_trace_form(beta1());
    CHECK(cone_test(valpha(2.0, tf), tf) == ConeClass::nonneg);   // alpha^2 - 1 = 3 > 0
    CHECK(cone_test(valpha(1.0, tf), tf) == ConeClass::neutral);  // compressed value 0
    CHECK(cone_test(valpha(0.0, tf), tf) == ConeClass::nonpos);   // compressed value -1
    CHECK(cone_test(TraceSubspace::zero(2), tf) == ConeClass::neutral);
    CHECK(cone_test(TraceSubspace::full(2), tf) == ConeClass::neither);

    // sign matches the 1x1 compression (1, a) Q (1, a)^* = a^2 - 1
    for (double alpha : {-3.0, -0.2, 0.8, 5.0}) {
        double compressed = alpha * alpha - 1.0;
        ConeClass c = cone_test(valpha(alpha, tf), tf);
        if (compressed > 0) CHECK(c == ConeClass::nonneg);
        if (compressed < 0) CHECK(c == ConeClass::nonpos);
    }
}

TEST_CASE("nonzero subspaces of ker T1 never test nonnegative") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 5; ++t) {
        int n = 2 + static_cast<int>(rng() % 2);
        FriedrichsSpec spec = fkit_test::random_spec(rng, n, ScalarField::real);
        TraceForm tf = build_trace_form(spec);
        KernelBases kb = kernel_traces(spec, tf);
        for (int s = 0; s < 8; ++s) {
            int dim = 1 + static_cast<int>(rng() % n);
            Eigen::MatrixXcd sub =
                kb.K.basis * fkit_test::random_matrix(rng, n, dim, false);
            ConeClass c = cone_test(TraceSubspace::from_span(sub), tf);
            CHECK(c == ConeClass::nonpos);  // Q is negative definite there
        }
    }
}

TEST_CASE("kernel projections split trace vectors uniquely") {
    FriedrichsSpec spec = beta1();
    TraceForm tf = build_trace_form(spec);
    KernelBases kb = kernel_traces(spec, tf);

    // oracle: solve the 2x2 system (1,0) = s (1, e^-1) + r (1, e)
    double e = std::exp(1.0), einv = std::exp(-1.0);
    double s = e / (e - einv);
    double r = 1.0 - s;
    CHECK(s == doctest::Approx(1.1565176).epsilon(1e-6));

    Eigen::Vector2cd t(1.0, 0.0);
    auto [k, kt] = project_kernels(t, kb);
    CHECK((k + kt - t).norm() < 1e-10);
    Eigen::Vector2cd k_expected(s, s * einv), kt_expected(r, r * e);
    CHECK((k - k_expected).norm() < 1e-8);
    CHECK((kt - kt_expected).norm() < 1e-8);

    // idempotence on the kernel components themselves
    auto [k2, kt2] = project_kernels(kb.Kt.basis.col(0), kb);
    CHECK(k2.norm() < 1e-10);
    CHECK((kt2 - kb.Kt.basis.col(0)).norm() < 1e-10);
    auto [k3, kt3] = project_kernels(kb.K.basis.col(0), kb);
    CHECK(kt3.norm() < 1e-10);
    CHECK((k3 - kb.K.basis.col(0)).norm() < 1e-10);
}

TEST_CASE("boundary-condition constructors") {
    FriedrichsSpec spec = beta1();
    TraceForm tf = build_trace_form(spec);

    // span form
    Eigen::MatrixXcd cols(2, 1);
    cols << 1.0, 2.0;
    TraceSubspace v = subspace_from_full_vectors(cols, tf);
    CHECK(subspace_distance(v, valpha(2.0, tf)) < 1e-12);

    // constraint form: u(b) = 2 u(a)  <=>  -2 u(a) + u(b) = 0
    Eigen::MatrixXcd ma(1, 1), mb(1, 1);
    ma << -2.0;
    mb << 1.0;
    CHECK(subspace_distance(subspace_from_constraints(ma, mb, tf), valpha(2.0, tf)) < 1e-12);

    CHECK_THROWS_AS((void)subspace_from_alpha(1.0, false, build_trace_form(block_example())),
                    NotScalar);
}
