#ifndef FKIT_LINALG_HPP
#define FKIT_LINALG_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace fkit {

// Rank decisions use singular values relative to the largest one; subspaces
// are compared by their largest principal angle.

inline int numerical_rank(const Eigen::MatrixXcd& m, double rank_tol = 1e-8) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > rank_tol * s[0]) ++r;
    return r;
}

inline Eigen::MatrixXcd orthonormal_colspace(const Eigen::MatrixXcd& m, double rank_tol = 1e-8) {
    if (m.cols() == 0) return Eigen::MatrixXcd(m.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return Eigen::MatrixXcd(m.rows(), 0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > rank_tol * s[0]) ++r;
    return svd.matrixU().leftCols(r);
}

inline Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& m, double rank_tol = 1e-8) {
    if (m.rows() == 0) return Eigen::MatrixXcd::Identity(m.cols(), m.cols());
    if (m.cols() == 0) return Eigen::MatrixXcd(0, 0);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double smax = s.size() > 0 ? s[0] : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > rank_tol * std::max(smax, 1e-300)) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

// Largest principal angle, as sin(theta_max), between column spaces of two
// orthonormal bases; 1 when the dimensions disagree. Computed from the
// projector residual, which keeps small angles accurate near machine zero.
inline double subspace_distance(const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2) {
    if (b1.cols() != b2.cols()) return 1.0;
    if (b1.cols() == 0) return 0.0;
    Eigen::MatrixXcd r12 = b2 - b1 * (b1.adjoint() * b2);
    Eigen::MatrixXcd r21 = b1 - b2 * (b2.adjoint() * b1);
    Eigen::JacobiSVD<Eigen::MatrixXcd> s12(r12), s21(r21);
    double s = std::max(s12.singularValues().maxCoeff(), s21.singularValues().maxCoeff());
    return std::min(1.0, s);
}

// Is span(inner) contained in span(outer)? outer must be orthonormal.
inline bool subspace_contains(const Eigen::MatrixXcd& outer, const Eigen::MatrixXcd& inner,
                              double tol = 1e-8) {
    if (inner.cols() == 0) return true;
    Eigen::MatrixXcd resid = inner - outer * (outer.adjoint() * inner);
    return resid.norm() <= tol * std::max(1.0, inner.norm());
}

inline double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()[0];
}

}  // namespace fkit

#endif
