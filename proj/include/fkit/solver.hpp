#ifndef FKIT_SOLVER_HPP
#define FKIT_SOLVER_HPP

#include <cstdint>
#include <functional>

#include "fkit/classification.hpp"
#include "fkit/ode.hpp"
#include "fkit/spec.hpp"
#include "fkit/trace_space.hpp"

namespace fkit {

struct BoundaryValueSolution {
    Trajectory u;
    Eigen::VectorXcd trace;      // (u(a), u(b))
    double residual_l2 = 0.0;    // ||A u' + C u - f||_L2 (defect of the dense solution)
    double trace_distance = 0.0; // distance of the trace to the boundary subspace
    double norm_u = 0.0;
    double norm_t1u = 0.0;       // ||A u' + C u||_L2
    double bound_ratio = 0.0;    // (||u|| + ||T1 u||) / ||T1 u||; 0 when f = 0
    double condition = 0.0;      // conditioning of the trace system
    double mu = 0.0;             // positivity constant used by the a priori bound
};

struct AprioriReport {
    int trials = 0;
    int skipped = 0;
    double worst_bound_ratio = 0.0;  // sup (||u|| + ||T1u||) / ||T1u||, bound 1 + 1/mu
    double worst_mu_ratio = 0.0;     // sup mu ||u|| / ||T1u||, bound 1
    bool pass = false;
};

// Solves T u = f by superposition of a particular solution and fundamental
// columns, with the trace constrained to the boundary subspace. Holds the
// per-spec objects so repeated solves share the fundamental matrices.
class BvpSolver {
public:
    explicit BvpSolver(const FriedrichsSpec& spec);

    const FriedrichsSpec& spec() const { return spec_; }
    const PartsDecomposition& parts() const { return parts_; }
    const TraceForm& trace_form() const { return tf_; }
    const KernelBases& kernels() const { return kb_; }

    // Requires is_bijective(v); throws NotBijective / IllConditioned.
    BoundaryValueSolution solve(const TraceSubspace& v,
                                const std::function<VectorXcd(double)>& f) const;

    // Solves Tt v = g with the trace in V^[perp] (the mutually adjoint
    // realisation's domain).
    BoundaryValueSolution adjoint_solve(const TraceSubspace& v,
                                        const std::function<VectorXcd(double)>& g) const;

    // |<T1 u, v> - <u, Tt1 v>| by quadrature; vanishes for a solve /
    // adjoint_solve pair since their boundary form is zero.
    double duality_defect(const BoundaryValueSolution& u, const BoundaryValueSolution& v) const;

    // Seeded random right-hand sides (trig/polynomial, degree <= 6); requires
    // a signed-boundary-map realisation, else PreconditionNotSigned.
    AprioriReport check_apriori(const TraceSubspace& v, int trials, std::uint64_t seed) const;

private:
    BoundaryValueSolution solve_variant(const TraceSubspace& target_subspace,
                                        const std::function<VectorXcd(double)>& f,
                                        OperatorVariant variant) const;

    FriedrichsSpec spec_;
    PartsDecomposition parts_;
    TraceForm tf_;
    KernelBases kb_;
    FundamentalMatrix phi_;   // maximal variant
    FundamentalMatrix psi_;   // adjoint variant
};

// Deterministic random right-hand side used by check_apriori; exposed for the
// test suites.
std::vector<ExprEntry> random_rhs_expressions(int n, std::uint64_t seed);

}  // namespace fkit

#endif
