#include "fkit/trace_space.hpp"

#include <cmath>

#include "fkit/defect.hpp"
#include "fkit/errors.hpp"
#include "fkit/linalg.hpp"
#include "fkit/ode.hpp"

namespace fkit {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

double TraceForm::norm() const { return spectral_norm(Q); }

std::complex<double> TraceForm::form(const VectorXcd& u, const VectorXcd& v) const {
    return (v.adjoint() * Q * u)(0, 0);
}

VectorXcd TraceForm::restrict_full(const VectorXcd& full_trace) const {
    VectorXcd r(eff_dim());
    for (int i = 0; i < eff_dim(); ++i) r[i] = full_trace[kept[static_cast<size_t>(i)]];
    return r;
}

std::pair<int, int> TraceForm::signature() const {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(Q, Eigen::EigenvaluesOnly);
    double tol = 1e-10 * std::max(1e-300, norm());
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        if (eig.eigenvalues()[i] > tol) ++pos;
        if (eig.eigenvalues()[i] < -tol) ++neg;
    }
    return {pos, neg};
}

TraceForm build_trace_form(const FriedrichsSpec& spec) {
    int n = spec.n;
    MatrixXcd q_full = MatrixXcd::Zero(2 * n, 2 * n);
    q_full.topLeftCorner(n, n) = -spec.A.value(spec.a);
    q_full.bottomRightCorner(n, n) = spec.A.value(spec.b);
    q_full = 0.5 * (q_full + q_full.adjoint()).eval();

    TraceForm tf;
    tf.n = n;
    tf.field = spec.field;
    for (int k = 0; k < 2 * n; ++k) tf.kept.push_back(k);
    for (const DegeneracyFlag& f : spec.degeneracy) {
        int coord = f.endpoint == Endpoint::left ? f.block : n + f.block;
        std::erase(tf.kept, coord);
    }
    int eff = static_cast<int>(tf.kept.size());
    tf.Q.resize(eff, eff);
    for (int i = 0; i < eff; ++i)
        for (int j = 0; j < eff; ++j)
            tf.Q(i, j) = q_full(tf.kept[static_cast<size_t>(i)], tf.kept[static_cast<size_t>(j)]);
    return tf;
}

TraceSubspace TraceSubspace::zero(int eff_dim) { return {MatrixXcd(eff_dim, 0)}; }

TraceSubspace TraceSubspace::full(int eff_dim) {
    return {MatrixXcd(MatrixXcd::Identity(eff_dim, eff_dim))};
}

TraceSubspace TraceSubspace::from_span(const MatrixXcd& vectors, double rank_tol) {
    return {orthonormal_colspace(vectors, rank_tol)};
}

double subspace_distance(const TraceSubspace& v, const TraceSubspace& w) {
    return subspace_distance(v.basis, w.basis);
}

bool subspace_subset(const TraceSubspace& inner, const TraceSubspace& outer, double tol) {
    return subspace_contains(outer.basis, inner.basis, tol);
}

KernelBases kernel_traces(const FriedrichsSpec& spec, const TraceForm& tf) {
    int n = spec.n;
    std::vector<int> regular;
    for (int k = 0; k < n; ++k)
        if (!spec.is_flagged(k)) regular.push_back(k);

    std::vector<VectorXcd> k_cols, kt_cols;

    if (!regular.empty()) {
        FriedrichsSpec sub = spec;
        sub.n = static_cast<int>(regular.size());
        sub.A = spec.A.submatrix(regular);
        sub.C = spec.C.submatrix(regular);
        sub.degeneracy.clear();

        MatrixXcd phi_b = fundamental_matrix(sub, OperatorVariant::maximal).at_end();
        MatrixXcd psi_b = fundamental_matrix(sub, OperatorVariant::adjoint_maximal).at_end();

        for (int j = 0; j < sub.n; ++j) {
            VectorXcd full_k = VectorXcd::Zero(2 * n);
            VectorXcd full_kt = VectorXcd::Zero(2 * n);
            for (int i = 0; i < sub.n; ++i) {
                full_k[regular[static_cast<size_t>(i)]] = (i == j) ? 1.0 : 0.0;
                full_k[n + regular[static_cast<size_t>(i)]] = phi_b(i, j);
                full_kt[regular[static_cast<size_t>(i)]] = (i == j) ? 1.0 : 0.0;
                full_kt[n + regular[static_cast<size_t>(i)]] = psi_b(i, j);
            }
            k_cols.push_back(tf.restrict_full(full_k));
            kt_cols.push_back(tf.restrict_full(full_kt));
        }
    }

    for (const DegeneracyFlag& f : spec.degeneracy) {
        SingularBlockReport rep =
            analyze_singular_block(spec.A.entry(f.block, f.block), spec.C.entry(f.block, f.block),
                                   f.block, f.endpoint, spec.a, spec.b, spec.tol.ode_rtol);
        // the kernel element is supported on this block; its only surviving
        // trace coordinate sits at the non-degenerate endpoint
        int coord = f.endpoint == Endpoint::left ? n + f.block : f.block;
        VectorXcd full = VectorXcd::Zero(2 * n);
        full[coord] = 1.0;
        if (rep.t1_in_l2) k_cols.push_back(tf.restrict_full(full));
        if (rep.tt1_in_l2) kt_cols.push_back(tf.restrict_full(full));
    }

    auto stack = [&](const std::vector<VectorXcd>& cols) {
        MatrixXcd m(tf.eff_dim(), static_cast<Eigen::Index>(cols.size()));
        for (size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cols[j];
        return m;
    };

    KernelBases kb;
    kb.K = TraceSubspace::from_span(stack(k_cols), spec.tol.rank_tol);
    kb.Kt = TraceSubspace::from_span(stack(kt_cols), spec.tol.rank_tol);

    if (kb.K.dim() != static_cast<int>(k_cols.size()) ||
        kb.Kt.dim() != static_cast<int>(kt_cols.size()))
        throw DecompositionDefect("kernel trace vectors are numerically dependent");
    if (kb.K.dim() + kb.Kt.dim() != tf.eff_dim())
        throw DecompositionDefect("kernel traces do not span the effective trace space: " +
                                  std::to_string(kb.K.dim()) + " + " + std::to_string(kb.Kt.dim()) +
                                  " != " + std::to_string(tf.eff_dim()));
    MatrixXcd both(tf.eff_dim(), kb.K.dim() + kb.Kt.dim());
    both << kb.K.basis, kb.Kt.basis;
    if (numerical_rank(both, spec.tol.rank_tol) != tf.eff_dim())
        throw DecompositionDefect("ker T1 and ker Tt1 traces intersect nontrivially");
    return kb;
}

TraceSubspace ortho_complement(const TraceSubspace& v, const TraceForm& tf, double rank_tol) {
    if (v.dim() == 0) return TraceSubspace::full(tf.eff_dim());
    MatrixXcd constraints = v.basis.adjoint() * tf.Q;  // rows annihilate V^[perp]
    return {nullspace(constraints, rank_tol)};
}

ConeClass cone_test(const TraceSubspace& v, const TraceForm& tf, double psd_tol) {
    if (v.dim() == 0) return ConeClass::neutral;
    MatrixXcd compressed = v.basis.adjoint() * tf.Q * v.basis;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(compressed, Eigen::EigenvaluesOnly);
    double tol = psd_tol * std::max(1e-300, tf.norm());
    bool nonneg = eig.eigenvalues().minCoeff() >= -tol;
    bool nonpos = eig.eigenvalues().maxCoeff() <= tol;
    if (nonneg && nonpos) return ConeClass::neutral;
    if (nonneg) return ConeClass::nonneg;
    if (nonpos) return ConeClass::nonpos;
    return ConeClass::neither;
}

std::pair<VectorXcd, VectorXcd> project_kernels(const VectorXcd& t, const KernelBases& kb) {
    int dk = kb.K.dim(), dkt = kb.Kt.dim();
    MatrixXcd m(kb.K.basis.rows(), dk + dkt);
    if (dk + dkt == 0) throw DecompositionDefect("empty kernel decomposition");
    m << kb.K.basis, kb.Kt.basis;
    if (numerical_rank(m) < dk + dkt)
        throw DecompositionDefect("kernel decomposition is rank-deficient");
    VectorXcd c = m.colPivHouseholderQr().solve(t);
    double resid = (m * c - t).norm();
    if (resid > 1e-10 * std::max(1.0, t.norm()))
        throw DecompositionDefect("trace vector does not decompose over the kernels");
    return {kb.K.basis * c.head(dk), kb.Kt.basis * c.tail(dkt)};
}

TraceSubspace subspace_from_full_vectors(const MatrixXcd& columns, const TraceForm& tf,
                                         double rank_tol) {
    if (columns.rows() != tf.full_dim())
        throw SpecFormatError("boundary-condition vectors must have length 2n");
    MatrixXcd eff(tf.eff_dim(), columns.cols());
    for (Eigen::Index j = 0; j < columns.cols(); ++j)
        eff.col(j) = tf.restrict_full(columns.col(j));
    return TraceSubspace::from_span(eff, rank_tol);
}

TraceSubspace subspace_from_constraints(const MatrixXcd& Ma, const MatrixXcd& Mb,
                                        const TraceForm& tf, double rank_tol) {
    if (Ma.cols() != tf.n || Mb.cols() != tf.n || Ma.rows() != Mb.rows())
        throw SpecFormatError("boundary constraint matrices must be m x n with equal m");
    MatrixXcd stacked(Ma.rows(), 2 * tf.n);
    stacked << Ma, Mb;
    MatrixXcd null_full = nullspace(stacked, rank_tol);
    return subspace_from_full_vectors(null_full, tf, rank_tol);
}

TraceSubspace subspace_from_alpha(std::complex<double> alpha, bool is_infinite,
                                  const TraceForm& tf) {
    if (tf.n != 1 || tf.eff_dim() != 2) throw NotScalar();
    Eigen::Vector2cd v;
    if (is_infinite)
        v << 0.0, 1.0;
    else
        v << 1.0, alpha;
    return TraceSubspace::from_span(v, 1e-14);
}

}  // namespace fkit
