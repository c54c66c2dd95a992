#include "fkit/solver.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "fkit/errors.hpp"
#include "fkit/linalg.hpp"

namespace fkit {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

const FriedrichsSpec& require_nondegenerate(const FriedrichsSpec& spec) {
    if (spec.degenerate())
        throw ValidationError("boundary-value solver requires a non-degenerate spec");
    return spec;
}

// Solver integrations run tighter than the reporting tolerance so the defect
// of the dense solution stays well under the residual contract.
double solver_rtol(const FriedrichsSpec& spec) {
    return std::max(1e-13, 0.01 * spec.tol.ode_rtol);
}

}  // namespace

BvpSolver::BvpSolver(const FriedrichsSpec& spec)
    : spec_(require_nondegenerate(spec)),
      parts_(validate_spec(spec_)),
      tf_(build_trace_form(spec_)),
      kb_(kernel_traces(spec_, tf_)),
      phi_(fundamental_matrix(spec_, OperatorVariant::maximal, spec_.a, spec_.b,
                              solver_rtol(spec_))),
      psi_(fundamental_matrix(spec_, OperatorVariant::adjoint_maximal, spec_.a, spec_.b,
                              solver_rtol(spec_))) {}

BoundaryValueSolution BvpSolver::solve_variant(const TraceSubspace& target_subspace,
                                               const std::function<VectorXcd(double)>& f,
                                               OperatorVariant variant) const {
    int n = spec_.n;
    const FundamentalMatrix& fm = variant == OperatorVariant::maximal ? phi_ : psi_;

    Trajectory up = particular_solution(spec_, f, variant, solver_rtol(spec_));
    VectorXcd up_b = up.value(spec_.b);

    // trace of u_p + Phi xi is (xi, u_p(b) + Phi(b) xi); require it in the
    // target subspace by annihilating the orthogonal complement
    const MatrixXcd& basis = target_subspace.basis;
    MatrixXcd proj_out = MatrixXcd::Identity(2 * n, 2 * n) - basis * basis.adjoint();
    MatrixXcd trace_map(2 * n, n);
    trace_map.topRows(n) = MatrixXcd::Identity(n, n);
    trace_map.bottomRows(n) = fm.at_end();
    VectorXcd offset = VectorXcd::Zero(2 * n);
    offset.tail(n) = up_b;

    MatrixXcd g = proj_out * trace_map;
    Eigen::JacobiSVD<MatrixXcd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smax = svd.singularValues().maxCoeff();
    double smin = svd.singularValues().minCoeff();
    double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) throw IllConditioned(cond);
    VectorXcd xi = svd.solve(-proj_out * offset);

    VectorXcd trace = trace_map * xi + offset;
    double trace_distance = (proj_out * trace).norm() / (1.0 + trace.norm());
    if (trace_distance > 1e-8)
        throw InternalInconsistency("solution trace failed to land in the boundary subspace");

    // dense solution u = u_p + Phi xi
    auto fm_sol = std::make_shared<FundamentalMatrix>(fm);
    auto up_copy = std::make_shared<Trajectory>(up);
    Trajectory u;
    u.lo = spec_.a;
    u.hi = spec_.b;
    u.n = n;
    u.value = [fm_sol, up_copy, xi](double x) -> VectorXcd {
        return up_copy->value(x) + fm_sol->value(x) * xi;
    };
    int nn = n;
    u.derivative = [fm_sol, up_copy, xi, nn](double x) -> VectorXcd {
        VectorXcd dflat = fm_sol->dense().derivative(x);
        Eigen::Map<const MatrixXcd> dmat(dflat.data(), nn, nn);
        return up_copy->derivative(x) + dmat * xi;
    };

    // residual and norms of the variant's operator applied to u
    const CoefficientField zero_order =
        variant == OperatorVariant::maximal ? spec_.C : spec_.partner_C();
    double a_sign = variant == OperatorVariant::maximal ? 1.0 : -1.0;
    auto apply_op = [this, &zero_order, a_sign, &u](double x) -> VectorXcd {
        return a_sign * (spec_.A.value(x) * u.derivative(x)) + zero_order.value(x) * u.value(x);
    };
    auto resid_sq = [&apply_op, &f](double x) {
        return std::complex<double>((apply_op(x) - f(x)).squaredNorm(), 0.0);
    };
    auto op_sq = [&apply_op](double x) {
        return std::complex<double>(apply_op(x).squaredNorm(), 0.0);
    };

    BoundaryValueSolution sol;
    sol.residual_l2 =
        std::sqrt(std::max(0.0, integrate_adaptive(resid_sq, spec_.a, spec_.b).value.real()));
    sol.norm_t1u =
        std::sqrt(std::max(0.0, integrate_adaptive(op_sq, spec_.a, spec_.b).value.real()));
    sol.norm_u = l2_norm(u);
    sol.bound_ratio = sol.norm_t1u > 0.0 ? (sol.norm_u + sol.norm_t1u) / sol.norm_t1u : 0.0;
    sol.u = std::move(u);
    sol.trace = trace;
    sol.trace_distance = trace_distance;
    sol.condition = cond;
    sol.mu = parts_.mu;
    return sol;
}

BoundaryValueSolution BvpSolver::solve(const TraceSubspace& v,
                                       const std::function<VectorXcd(double)>& f) const {
    if (!is_bijective(v, kb_, tf_, spec_.tol.rank_tol).bijective) throw NotBijective();
    return solve_variant(v, f, OperatorVariant::maximal);
}

BoundaryValueSolution BvpSolver::adjoint_solve(const TraceSubspace& v,
                                               const std::function<VectorXcd(double)>& g) const {
    if (!is_bijective(v, kb_, tf_, spec_.tol.rank_tol).bijective) throw NotBijective();
    TraceSubspace v_perp = ortho_complement(v, tf_, spec_.tol.rank_tol);
    return solve_variant(v_perp, g, OperatorVariant::adjoint_maximal);
}

double BvpSolver::duality_defect(const BoundaryValueSolution& u,
                                 const BoundaryValueSolution& v) const {
    CoefficientField ct = spec_.partner_C();
    auto t1u = [this, &u](double x) -> VectorXcd {
        return spec_.A.value(x) * u.u.derivative(x) + spec_.C.value(x) * u.u.value(x);
    };
    auto tt1v = [this, &ct, &v](double x) -> VectorXcd {
        return -(spec_.A.value(x) * v.u.derivative(x)) + ct.value(x) * v.u.value(x);
    };
    auto lhs = [&t1u, &v](double x) { return std::complex<double>(v.u.value(x).dot(t1u(x))); };
    auto rhs = [&tt1v, &u](double x) { return std::complex<double>(tt1v(x).dot(u.u.value(x))); };
    std::complex<double> a = integrate_adaptive(lhs, spec_.a, spec_.b).value;
    std::complex<double> b = integrate_adaptive(rhs, spec_.a, spec_.b).value;
    return std::abs(a - b);
}

std::vector<ExprEntry> random_rhs_expressions(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<ExprEntry> out;
    out.reserve(static_cast<size_t>(n));
    for (int comp = 0; comp < n; ++comp) {
        ExprPtr x = make_variable();
        ExprPtr e = make_number(coeff(rng));
        for (int k = 1; k <= 3; ++k)
            e = make_add(e, make_mul(make_number(coeff(rng)), make_pow(x, make_number(k))));
        for (int k = 1; k <= 6; ++k) {
            ExprPtr arg = make_mul(make_number(static_cast<double>(k)), x);
            e = make_add(e, make_mul(make_number(coeff(rng)), make_call(FuncId::sin, arg)));
            e = make_add(e, make_mul(make_number(coeff(rng)), make_call(FuncId::cos, arg)));
        }
        out.push_back({e, make_number(0.0)});
    }
    return out;
}

AprioriReport BvpSolver::check_apriori(const TraceSubspace& v, int trials,
                                       std::uint64_t seed) const {
    RealisationReport rep = classify(v, kb_, tf_, spec_.tol);
    if (!rep.signed_boundary_map) throw PreconditionNotSigned();

    AprioriReport out;
    const double tol = 1e-7;
    out.pass = true;
    for (int t = 0; t < trials; ++t) {
        Trajectory f =
            trajectory_from_expressions(random_rhs_expressions(spec_.n, seed + 1000003ULL * t),
                                        spec_.a, spec_.b);
        BoundaryValueSolution sol = solve(v, f.value);
        if (sol.norm_t1u < 1e-13) {
            ++out.skipped;  // degenerate ratio, nothing to bound
            continue;
        }
        ++out.trials;
        double mu_ratio = parts_.mu * sol.norm_u / sol.norm_t1u;
        out.worst_bound_ratio = std::max(out.worst_bound_ratio, sol.bound_ratio);
        out.worst_mu_ratio = std::max(out.worst_mu_ratio, mu_ratio);
        if (sol.bound_ratio > 1.0 + 1.0 / parts_.mu + tol) out.pass = false;
        if (mu_ratio > 1.0 + tol) out.pass = false;
    }
    return out;
}

}  // namespace fkit
