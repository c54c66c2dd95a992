#include "fkit/classification.hpp"

#include <cmath>

#include "fkit/errors.hpp"
#include "fkit/linalg.hpp"
#include "fkit/ode.hpp"
#include "fkit/parallel.hpp"

namespace fkit {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

// Flag tolerances sit at 1e-8; the route cross-check only vetoes outside a
// wider dead band, so boundary cases never trip it while sign errors do.
constexpr double kFlagTol = 1e-8;
constexpr double kVetoTol = 1e-6;

int intersection_dim(const TraceSubspace& v, const TraceSubspace& k, double rank_tol) {
    if (v.dim() == 0 || k.dim() == 0) return 0;
    MatrixXcd stacked(v.basis.rows(), v.dim() + k.dim());
    stacked << v.basis, k.basis;
    return v.dim() + k.dim() - numerical_rank(stacked, rank_tol);
}

}  // namespace

BijectivityCheck is_bijective(const TraceSubspace& v, const KernelBases& kb, const TraceForm& tf,
                              double rank_tol) {
    BijectivityCheck out;
    MatrixXcd stacked(tf.eff_dim(), v.dim() + kb.K.dim());
    if (stacked.cols() == 0) {
        out.stacked_rank = 0;
        out.trivial_intersection = true;
        out.complements_kernel = tf.eff_dim() == 0;
        out.bijective = out.complements_kernel;
        return out;
    }
    stacked << v.basis, kb.K.basis;
    out.stacked_rank = numerical_rank(stacked, rank_tol);
    out.trivial_intersection = out.stacked_rank == v.dim() + kb.K.dim();
    out.complements_kernel = v.dim() + kb.K.dim() == tf.eff_dim();
    out.bijective = out.trivial_intersection && out.complements_kernel;
    return out;
}

ClassifyingMap build_U(const TraceSubspace& v, const KernelBases& kb, const TraceForm& tf,
                       double rank_tol) {
    if (intersection_dim(v, kb.K, rank_tol) > 0) throw WellDefinednessError();

    int m = v.dim();
    ClassifyingMap u;
    if (m == 0) {
        u.domain_basis = MatrixXcd(tf.eff_dim(), 0);
        u.images = MatrixXcd(tf.eff_dim(), 0);
        return u;
    }

    MatrixXcd k_parts(tf.eff_dim(), m), kt_parts(tf.eff_dim(), m);
    for (int j = 0; j < m; ++j) {
        auto [k, kt] = project_kernels(v.basis.col(j), kb);
        k_parts.col(j) = k;
        kt_parts.col(j) = kt;
    }

    // V cap K = {0} makes the Kt-components independent, so Gt has dim m
    MatrixXcd d = orthonormal_colspace(kt_parts, rank_tol);
    if (d.cols() != m)
        throw InternalInconsistency("projection of V to ker Tt1 lost rank despite V cap K = 0");
    MatrixXcd coords = kt_parts.colPivHouseholderQr().solve(d);
    u.domain_basis = d;
    u.images = k_parts * coords;

    // largest generalized singular value between the kernel Gram forms
    MatrixXcd gram_domain = d.adjoint() * tf.Q * d;               // positive definite on Kt
    MatrixXcd gram_image = -(u.images.adjoint() * tf.Q * u.images);  // PSD on K
    gram_domain = 0.5 * (gram_domain + gram_domain.adjoint()).eval();
    gram_image = 0.5 * (gram_image + gram_image.adjoint()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> eig(gram_image, gram_domain,
                                                            Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    u.norm_indefinite = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    return u;
}

TraceSubspace build_V_from_U(const ClassifyingMap& u, const KernelBases& kb, double rank_tol) {
    (void)kb;
    return TraceSubspace::from_span(u.images + u.domain_basis, rank_tol);
}

RealisationReport classify(const TraceSubspace& v, const KernelBases& kb, const TraceForm& tf,
                           const Tolerances& tol) {
    RealisationReport rep;
    rep.V = v;
    rep.V_perp = ortho_complement(v, tf, tol.rank_tol);

    rep.cone_v = cone_test(v, tf, tol.psd_tol);
    rep.cone_v_perp = cone_test(rep.V_perp, tf, tol.psd_tol);
    if (v.dim() > 0) {
        MatrixXcd compressed = v.basis.adjoint() * tf.Q * v.basis;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(compressed, Eigen::EigenvaluesOnly);
        rep.min_compressed_eigenvalue = eig.eigenvalues().minCoeff();
    }

    rep.bij = is_bijective(v, kb, tf, tol.rank_tol);
    rep.bijective = rep.bij.bijective;
    rep.in_w_plus = cone_is_nonneg(rep.cone_v);
    rep.signed_boundary_map = rep.in_w_plus && cone_is_nonpos(rep.cone_v_perp);
    rep.symmetric = subspace_subset(v, rep.V_perp, kFlagTol);
    rep.perp_distance = subspace_distance(v, rep.V_perp);
    rep.selfadjoint_type =
        rep.symmetric && v.dim() == rep.V_perp.dim() && rep.perp_distance <= kFlagTol;

    if (rep.bij.trivial_intersection) {
        ClassifyingMap u = build_U(v, kb, tf, tol.rank_tol);

        MatrixXcd gd = u.domain_basis.adjoint() * tf.Q * u.domain_basis;
        MatrixXcd gi = -(u.images.adjoint() * tf.Q * u.images);
        double scale = std::max(1.0, spectral_norm(gd));
        rep.isometry_defect = (gi - gd).norm() / scale;

        bool u_contraction = u.norm_indefinite <= 1.0 + kFlagTol;
        bool u_domain_full = u.domain_dim() == kb.d_minus();
        bool u_isometry = rep.isometry_defect <= kFlagTol;
        bool u_unitary = u_isometry && u_domain_full &&
                         numerical_rank(u.images, tol.rank_tol) == kb.d_plus();

        // contraction <-> nonnegativity, vetoed only outside a dead band
        // around ||U|| = 1 so boundary subspaces cannot trip it
        if (rep.in_w_plus != u_contraction && std::abs(u.norm_indefinite - 1.0) > kVetoTol)
            throw InternalInconsistency("cone test and classifying-map norm disagree");
        // bijective <-> Gt = ker Tt1 (both discrete decisions)
        if (rep.bijective != u_domain_full)
            throw InternalInconsistency("bijectivity routes disagree");
        // neutrality <-> indefinite isometry
        if (rep.symmetric && rep.isometry_defect > kVetoTol)
            throw InternalInconsistency("neutral subspace whose map is not an isometry");
        if (!rep.symmetric && rep.isometry_defect < kFlagTol * 1e-4)
            throw InternalInconsistency("indefinite isometry whose subspace is not neutral");
        // selfadjoint type <-> unitary onto ker T1
        if (rep.selfadjoint_type && !u_unitary)
            throw InternalInconsistency("selfadjoint-type subspace without a unitary map");
        if (u_unitary && rep.perp_distance > kVetoTol)
            throw InternalInconsistency("unitary map whose subspace is not selfadjoint-type");

        rep.U = std::move(u);
    } else {
        // V meets ker T1, so V cannot sit inside W+ and cannot be neutral
        if (rep.bijective || rep.in_w_plus || rep.symmetric)
            throw InternalInconsistency(
                "subspace meeting ker T1 classified as bijective/nonnegative/symmetric");
    }

    if (rep.signed_boundary_map && !rep.bijective)
        throw InternalInconsistency("signed boundary map without bijectivity");
    if (rep.selfadjoint_type && !(rep.symmetric && rep.signed_boundary_map))
        throw InternalInconsistency("selfadjoint-type flags are not monotone");
    return rep;
}

AdjointCount count_mutually_adjoint(int d_plus, int d_minus, ScalarField field) {
    if (d_plus != d_minus) return AdjointCount::zero;
    if (d_plus == 0) return AdjointCount::one;
    if (d_plus == 1) return field == ScalarField::real ? AdjointCount::two : AdjointCount::infinite;
    return AdjointCount::infinite;
}

const char* to_string(AdjointCount c) {
    switch (c) {
        case AdjointCount::zero: return "0";
        case AdjointCount::one: return "1";
        case AdjointCount::two: return "2";
        case AdjointCount::infinite: return "infinite";
    }
    return "?";
}

TraceSubspace make_neutral_realisation(const KernelBases& kb, const TraceForm& tf) {
    if (kb.d_plus() != kb.d_minus())
        throw ValidationError("kernels are not isomorphic: no subspace with V = V^[perp] exists");
    int d = kb.d_plus();
    if (d == 0) return TraceSubspace::zero(tf.eff_dim());

    // normalise both kernels in their definite Gram forms; the identity map in
    // those coordinates is an indefinite-Gram unitary
    MatrixXcd gram_kt = kb.Kt.basis.adjoint() * tf.Q * kb.Kt.basis;
    MatrixXcd gram_k = -(kb.K.basis.adjoint() * tf.Q * kb.K.basis);
    Eigen::LLT<MatrixXcd> lt(0.5 * (gram_kt + gram_kt.adjoint()));
    Eigen::LLT<MatrixXcd> lk(0.5 * (gram_k + gram_k.adjoint()));
    if (lt.info() != Eigen::Success || lk.info() != Eigen::Success)
        throw InternalInconsistency("kernel Gram matrices are not definite");
    MatrixXcd dom = lt.matrixL().adjoint().solve<Eigen::OnTheRight>(kb.Kt.basis);
    MatrixXcd img = lk.matrixL().adjoint().solve<Eigen::OnTheRight>(kb.K.basis);
    return TraceSubspace::from_span(img + dom);
}

AlphaSweepResult sweep_alpha(const FriedrichsSpec& spec, const std::vector<AlphaValue>& alphas) {
    if (spec.n != 1 || spec.degenerate()) throw NotScalar();

    TraceForm tf = build_trace_form(spec);
    KernelBases kb = kernel_traces(spec, tf);

    AlphaSweepResult out;
    out.alpha_beta = fundamental_matrix(spec, OperatorVariant::maximal).at_end()(0, 0);

    // cross-check the closed form exp(-int C/A) against the integrated value
    {
        auto integrand = [&spec](double x) {
            return spec.C.value(x)(0, 0) / spec.A.value(x)(0, 0);
        };
        std::complex<double> target = std::exp(-integrate_adaptive(integrand, spec.a, spec.b).value);
        if (std::abs(target - out.alpha_beta) > 1e-8 * (1.0 + std::abs(target)))
            throw InternalInconsistency("fundamental value and quadrature of C/A disagree");
    }

    out.entries.resize(alphas.size());
    parallel_for_index(static_cast<int>(alphas.size()), [&](int i) {
        const AlphaValue& a = alphas[static_cast<size_t>(i)];
        TraceSubspace v = subspace_from_alpha(a.value, a.infinite, tf);
        out.entries[static_cast<size_t>(i)] = {a, classify(v, kb, tf, spec.tol)};
    });
    return out;
}

FriedrichsSpec symmetric_adapter(const CoefficientField& m_field, const CoefficientField& s1,
                                 const CoefficientField& s2, double lo, double hi) {
    int n = m_field.dim();
    if (s1.dim() != n || s2.dim() != n)
        throw SpecFormatError("symmetric adapter requires matching dimensions");

    // quick Hermiticity screen of the bounded parts
    for (int probe = 0; probe <= 8; ++probe) {
        double x = lo + (hi - lo) * probe / 8.0;
        for (const auto* f : {&s1, &s2}) {
            MatrixXcd mval = f->value(x);
            if ((mval - mval.adjoint()).cwiseAbs().maxCoeff() >
                1e-10 * (1.0 + mval.cwiseAbs().maxCoeff()))
                throw NotHermitian(f == &s1 ? "S1" : "S2", x,
                                   (mval - mval.adjoint()).cwiseAbs().maxCoeff());
        }
    }

    // iA = M d/dx + M'/2, so T0 = iA - iS1 + S2 has A = M and
    // C = M'/2 - i S1 + S2
    CoefficientField dm = m_field.derivative();
    std::vector<ExprEntry> c_entries(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const ExprEntry& md = dm.entry(i, j);
            const ExprEntry& e1 = s1.entry(i, j);
            const ExprEntry& e2 = s2.entry(i, j);
            ExprPtr re = make_add(make_add(make_mul(make_number(0.5), md.re), e1.im), e2.re);
            ExprPtr im = make_add(make_sub(make_mul(make_number(0.5), md.im), e1.re), e2.im);
            c_entries[static_cast<size_t>(i) * n + j] = {re, im};
        }

    FriedrichsSpec spec;
    spec.field = ScalarField::cplx;
    spec.a = lo;
    spec.b = hi;
    spec.n = n;
    spec.A = m_field;
    spec.C = CoefficientField(n, std::move(c_entries));
    return spec;
}

}  // namespace fkit
