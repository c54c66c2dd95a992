#ifndef FKIT_TEST_SUPPORT_HPP
#define FKIT_TEST_SUPPORT_HPP

// Shared generators for the test suites: seeded random specs that satisfy the
// axioms by construction (diagonally dominant Hermitian A, strictly positive
// symmetric part), random subspaces, and small expression helpers.

#include <random>
#include <vector>

#include "fkit/expr.hpp"
#include "fkit/linalg.hpp"
#include "fkit/spec.hpp"
#include "fkit/trace_space.hpp"

namespace fkit_test {

using fkit::ExprEntry;
using fkit::ExprPtr;

inline ExprPtr num(double v) { return fkit::make_number(v); }
inline ExprPtr var() { return fkit::make_variable(); }

inline ExprPtr lin_sin(double amp, double freq, double phase) {
    // amp * sin(freq * x + phase)
    ExprPtr arg = fkit::make_add(fkit::make_mul(num(freq), var()), num(phase));
    return fkit::make_mul(num(amp), fkit::make_call(fkit::FuncId::sin, arg));
}

// Hermitian coefficient field: real dominant diagonal with a small smooth
// wobble, small conjugate-mirrored off-diagonal terms.
inline fkit::CoefficientField random_hermitian_field(std::mt19937_64& rng, int n, double center,
                                                     bool mixed_signs, bool complex_entries) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::vector<ExprEntry> es(static_cast<size_t>(n) * n);
    double off_amp = 0.08 / n;
    for (int i = 0; i < n; ++i) {
        double sign = mixed_signs && u01(rng) < 0.3 ? -1.0 : 1.0;
        double base = sign * (center + u01(rng));
        ExprPtr diag =
            fkit::make_add(num(base), lin_sin(0.2 * sym(rng), 1.0 + u01(rng), 3.0 * u01(rng)));
        es[static_cast<size_t>(i) * n + i] = {diag, num(0.0)};
        for (int j = i + 1; j < n; ++j) {
            ExprPtr re = lin_sin(off_amp * sym(rng), 1.0 + u01(rng), 3.0 * u01(rng));
            ExprPtr im = complex_entries
                             ? lin_sin(off_amp * sym(rng), 1.0 + u01(rng), 3.0 * u01(rng))
                             : num(0.0);
            es[static_cast<size_t>(i) * n + j] = {re, im};
            es[static_cast<size_t>(j) * n + i] = {re, fkit::make_neg(im)};
        }
    }
    return fkit::CoefficientField(n, std::move(es));
}

// Skew-Hermitian-valued field with small smooth entries.
inline fkit::CoefficientField random_skew_field(std::mt19937_64& rng, int n,
                                                bool complex_entries) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::vector<ExprEntry> es(static_cast<size_t>(n) * n);
    double amp = 0.3 / n;
    for (int i = 0; i < n; ++i) {
        // diagonal of a skew-Hermitian matrix is purely imaginary
        ExprPtr dim = complex_entries ? lin_sin(amp * sym(rng), 1.0 + u01(rng), 3.0 * u01(rng))
                                      : num(0.0);
        es[static_cast<size_t>(i) * n + i] = {num(0.0), dim};
        for (int j = i + 1; j < n; ++j) {
            ExprPtr re = lin_sin(amp * sym(rng), 1.0 + u01(rng), 3.0 * u01(rng));
            ExprPtr im = complex_entries
                             ? lin_sin(amp * sym(rng), 1.0 + u01(rng), 3.0 * u01(rng))
                             : num(0.0);
            es[static_cast<size_t>(i) * n + j] = {re, im};
            es[static_cast<size_t>(j) * n + i] = {fkit::make_neg(re), im};
        }
    }
    return fkit::CoefficientField(n, std::move(es));
}

// Non-degenerate spec with A invertible on [0, 1] (possibly with mixed
// inertia) and a symmetric part bounded below by roughly 1.
inline fkit::FriedrichsSpec random_spec(std::mt19937_64& rng, int n, fkit::ScalarField field) {
    bool cplx = field == fkit::ScalarField::cplx;
    fkit::FriedrichsSpec spec;
    spec.field = field;
    spec.a = 0.0;
    spec.b = 1.0;
    spec.n = n;
    spec.A = random_hermitian_field(rng, n, 2.0, true, cplx);
    spec.C = fkit::add_fields(random_hermitian_field(rng, n, 1.8, false, cplx),
                              random_skew_field(rng, n, cplx));
    return spec;
}

inline Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, int rows, int cols, bool cplx) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = std::complex<double>(g(rng), cplx ? g(rng) : 0.0);
    return m;
}

// Random subspace with V cap ker T1 = {0}: the graph of a random map from a
// random subspace of Kt into K, optionally scaled to force (non-)contraction.
inline fkit::TraceSubspace random_graph_subspace(std::mt19937_64& rng,
                                                 const fkit::KernelBases& kb, int dim,
                                                 double scale, bool cplx) {
    int dminus = kb.d_minus(), dplus = kb.d_plus();
    Eigen::MatrixXcd dom_coords =
        fkit::orthonormal_colspace(random_matrix(rng, dminus, dim, cplx));
    Eigen::MatrixXcd map = scale * random_matrix(rng, dplus, dom_coords.cols(), cplx);
    Eigen::MatrixXcd dom = kb.Kt.basis * dom_coords;
    Eigen::MatrixXcd img = kb.K.basis * map;
    return fkit::TraceSubspace::from_span(dom + img);
}

}  // namespace fkit_test

#endif
