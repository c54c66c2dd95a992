#ifndef FKIT_ODE_HPP
#define FKIT_ODE_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "fkit/spec.hpp"

namespace fkit {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Which maximal operator the equation belongs to:
//   maximal          A u' + C u          (T1 direction)
//   adjoint_maximal  -A u' + (C* - A') u (Tt1 direction)
enum class OperatorVariant { maximal, adjoint_maximal };

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-14;
    double max_step = 0.0;  // 0 = no cap
};

using OdeRhs = std::function<VectorXcd(double, const VectorXcd&)>;

// Dormand-Prince 5(4) dense solution. Stores the accepted nodes with their
// derivatives and the order-4 continuous extension on every step.
class DenseOdeSolution {
public:
    double x_begin() const { return x0_; }
    double x_end() const { return x1_; }
    int dim() const { return dim_; }

    VectorXcd value(double x) const;
    VectorXcd derivative(double x) const;

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<VectorXcd>& node_values() const { return node_values_; }
    const std::vector<VectorXcd>& node_derivatives() const { return node_derivs_; }

    // largest accepted per-step error estimate, in units of the tolerance
    double achieved_error() const { return achieved_error_; }

private:
    friend DenseOdeSolution integrate_dense(const OdeRhs&, double, double, VectorXcd,
                                            const OdeOptions&);
    struct Step {
        double x;
        double h;
        std::array<VectorXcd, 5> rcont;
    };
    int locate(double x) const;

    double x0_ = 0.0, x1_ = 0.0;
    int dim_ = 0;
    std::vector<Step> steps_;
    std::vector<double> nodes_;
    std::vector<VectorXcd> node_values_;
    std::vector<VectorXcd> node_derivs_;
    double achieved_error_ = 0.0;
};

// Integrates y' = rhs(x, y) from x0 to x1 (either direction).
// Throws StepSizeUnderflow when the controller collapses.
DenseOdeSolution integrate_dense(const OdeRhs& rhs, double x0, double x1, VectorXcd y0,
                                 const OdeOptions& opts = {});

// A vector-valued function of x on [lo, hi] with a derivative; the common
// currency between ODE output, closed-form test data and superpositions.
struct Trajectory {
    double lo = 0.0;
    double hi = 1.0;
    int n = 0;
    std::function<VectorXcd(double)> value;
    std::function<VectorXcd(double)> derivative;
};

Trajectory trajectory_from_solution(std::shared_ptr<const DenseOdeSolution> sol);
Trajectory trajectory_from_expressions(const std::vector<ExprEntry>& components, double lo,
                                       double hi);

// Fundamental matrix of the chosen first-order system, anchored at `anchor`
// with Phi(anchor) = I; columns span the solution space.
class FundamentalMatrix {
public:
    FundamentalMatrix(std::shared_ptr<const DenseOdeSolution> sol, int n, double anchor);

    int dim() const { return n_; }
    double anchor() const { return anchor_; }
    MatrixXcd value(double x) const;
    MatrixXcd at_end() const;
    double achieved_error() const { return sol_->achieved_error(); }
    const DenseOdeSolution& dense() const { return *sol_; }

    // |det Phi(x)| stays away from zero (Liouville); checked at nodes
    double min_abs_det() const;

private:
    std::shared_ptr<const DenseOdeSolution> sol_;
    int n_;
    double anchor_;
};

// Integrates over [x_from, x_to] (defaults to the spec interval, anchored on
// the left). Requires A invertible along the range; throws SingularA.
FundamentalMatrix fundamental_matrix(const FriedrichsSpec& spec, OperatorVariant variant);
FundamentalMatrix fundamental_matrix(const FriedrichsSpec& spec, OperatorVariant variant,
                                     double x_from, double x_to, double rtol);

// max over accepted nodes of ||A y' + C y|| / (1 + ||y||) with the stored node
// derivative (the variant's equation), certifying the algebra along the path.
double max_node_residual(const FriedrichsSpec& spec, OperatorVariant variant,
                         const DenseOdeSolution& sol);

// Solves the inhomogeneous system for the chosen variant with u(x_from) = 0.
Trajectory particular_solution(const FriedrichsSpec& spec,
                               const std::function<VectorXcd(double)>& f, OperatorVariant variant);
Trajectory particular_solution(const FriedrichsSpec& spec,
                               const std::function<VectorXcd(double)>& f, OperatorVariant variant,
                               double rtol);

struct QuadratureResult {
    std::complex<double> value{0.0, 0.0};
    double error_estimate = 0.0;
};

// Adaptive Simpson quadrature of a complex integrand, absolute floor 1e-14.
QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a,
                                    double b, double rel_tol = 1e-12);

// L2 pairing <u, v>, anti-linear in the second argument.
QuadratureResult l2_inner(const Trajectory& u, const Trajectory& v);
double l2_norm(const Trajectory& u);

}  // namespace fkit

#endif
