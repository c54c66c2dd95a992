#ifndef FKIT_TRACE_SPACE_HPP
#define FKIT_TRACE_SPACE_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "fkit/spec.hpp"

namespace fkit {

// Boundary structure of the graph space, reduced to traces. A trace vector
// stacks (u(a), u(b)); coordinates killed by a degenerate endpoint are deleted
// and everything below lives in the remaining "effective" coordinates.

struct TraceForm {
    Eigen::MatrixXcd Q;     // effective Hermitian form, from blockdiag(-A(a), A(b))
    int n = 0;              // system dimension
    ScalarField field = ScalarField::real;
    std::vector<int> kept;  // effective coordinates as indices into the full 2n

    int eff_dim() const { return static_cast<int>(kept.size()); }
    int full_dim() const { return 2 * n; }
    double norm() const;  // spectral norm of Q

    // [u|v] = v^H Q u, anti-linear in the second argument
    std::complex<double> form(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;

    Eigen::VectorXcd restrict_full(const Eigen::VectorXcd& full_trace) const;
    // (positive, negative) eigenvalue counts
    std::pair<int, int> signature() const;
};

TraceForm build_trace_form(const FriedrichsSpec& spec);

// Subspace V with W0 <= V <= W, identified with its trace image; holds an
// orthonormal basis (standard inner product) of full column rank.
struct TraceSubspace {
    Eigen::MatrixXcd basis;  // eff_dim x dim, orthonormal columns

    int dim() const { return static_cast<int>(basis.cols()); }

    static TraceSubspace zero(int eff_dim);
    static TraceSubspace full(int eff_dim);
    static TraceSubspace from_span(const Eigen::MatrixXcd& vectors, double rank_tol = 1e-8);
};

double subspace_distance(const TraceSubspace& v, const TraceSubspace& w);
bool subspace_subset(const TraceSubspace& inner, const TraceSubspace& outer, double tol = 1e-8);

// Trace bases of ker T1 and ker Tt1; dims are the deficiency indices.
struct KernelBases {
    TraceSubspace K;   // traces of ker T1,  Q negative definite on it
    TraceSubspace Kt;  // traces of ker Tt1, Q positive definite on it

    int d_plus() const { return K.dim(); }
    int d_minus() const { return Kt.dim(); }
};

// Non-degenerate blocks contribute fundamental-matrix columns; flagged scalar
// blocks contribute according to the singular-endpoint analysis.
KernelBases kernel_traces(const FriedrichsSpec& spec, const TraceForm& tf);

TraceSubspace ortho_complement(const TraceSubspace& v, const TraceForm& tf,
                               double rank_tol = 1e-8);

enum class ConeClass { nonneg, nonpos, neutral, neither };

// Sign of the compressed form B^H Q B at tolerance psd_tol * ||Q||.
ConeClass cone_test(const TraceSubspace& v, const TraceForm& tf, double psd_tol = 1e-8);

inline bool cone_is_nonneg(ConeClass c) { return c == ConeClass::nonneg || c == ConeClass::neutral; }
inline bool cone_is_nonpos(ConeClass c) { return c == ConeClass::nonpos || c == ConeClass::neutral; }

// Unique splitting t = k + kt over K + Kt (the zero-trace part is gone already).
// Throws DecompositionDefect when [K | Kt] is rank-deficient or the residual
// exceeds 1e-10 ||t||.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> project_kernels(const Eigen::VectorXcd& t,
                                                              const KernelBases& kb);

// Boundary-condition constructors (see the spec-file formats).
TraceSubspace subspace_from_full_vectors(const Eigen::MatrixXcd& columns, const TraceForm& tf,
                                         double rank_tol = 1e-8);
// V = { t : Ma t_a + Mb t_b = 0 }
TraceSubspace subspace_from_constraints(const Eigen::MatrixXcd& Ma, const Eigen::MatrixXcd& Mb,
                                        const TraceForm& tf, double rank_tol = 1e-8);
// scalar systems: u(b) = alpha u(a); alpha = infinity means u(a) = 0
TraceSubspace subspace_from_alpha(std::complex<double> alpha, bool is_infinite,
                                  const TraceForm& tf);

}  // namespace fkit

#endif
