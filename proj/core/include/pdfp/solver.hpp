#pragma once

#include "pdfp/linop.hpp"
#include "pdfp/precond.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/prox.hpp"

#include <memory>
#include <string>
#include <vector>

namespace pdfp {

/// Which extrapolated point the dual update evaluates K at.
/// `as_written` keeps the published iteration (the y-dual inertial point);
/// `condat` uses the primal inertial point, recovering the Chambolle-Pock
/// scheme in the no-G, no-inertia limit.
enum class DualRule { as_written, condat };

/// Full algorithm state: primal x, dual y for the G-term, dual blocks v for
/// the F-composition(s).
struct IterTriple {
    DenseVector x;
    DenseVector y;
    std::vector<DenseVector> v;

    DenseVector v_flat() const;
};

/// Strict upper bound for the constant relaxation rho admissible at
/// inertia cap alpha: (dh - a[a(1+a) + a*dh + th]) / (dh[1 + a(1+a) + a*dh + th]).
/// Requires delta_hat > (alpha^2(1+alpha) + alpha*theta)/(1-alpha^2).
double rho_upper_bound(double alpha, double theta, double delta_hat);

double delta_hat_lower_bound(double alpha, double theta);

/// Inertia/relaxation parameter schedule: alpha_1 = 0, then the constant cap.
struct InertialSchedule {
    double alpha = 0.0;
    double theta = 0.01;
    double delta_hat = 1e-6;
    double rho = 0.5;

    double alpha_at(std::size_t k) const { return k <= 1 ? 0.0 : alpha; }

    /// Throws unless all schedule invariants hold.
    void check() const;
};

/// delta_hat at twice its lower bound (floored at 1e-6), rho at 99% of its
/// strict upper bound.
InertialSchedule suggest_schedule(double alpha, double theta = 0.01);

struct SolveOptions {
    std::size_t max_iter = 10000;
    double tol = 1e-10;  // relative KM residual in the P-norm
    DualRule rule = DualRule::as_written;
    std::size_t record_every = 100;
    DenseVector x0;  // empty = zeros
};

struct ConvergenceRecord {
    std::size_t iter = 0;
    double objective = 0.0;
    double km_residual_P = 0.0;
    double primal_change = 0.0;
    double elapsed_ms = 0.0;
};

struct SolveResult {
    DenseVector x;
    std::vector<ConvergenceRecord> trace;
    std::string termination;  // "converged", "max_iter", "diverged"
    std::size_t iterations = 0;
    IterTriple state;
};

struct StepOutput {
    IterTriple next;      // relaxed z^{k+1}
    IterTriple proposed;  // unrelaxed z~^{k+1}
};

/// One iteration of the inertial primal-dual fixed-point scheme for
/// min F(Kx) + G(x) + H(x). prox_gstar and prox_fstar act for the
/// conjugates (wrap the primal functions in ConjugateProx). With a diagonal
/// metric this is the preconditioned iteration; the scalar metric is the
/// constant-diagonal special case of the same arithmetic.
StepOutput ipdfp_step(const IterTriple& z, const IterTriple& z_prev, const LinearMap& K,
                      const ProxFunction& prox_h, const ProxFunction& prox_gstar,
                      const ProxFunction& prox_fstar, const StepMetric& metric, double alpha_k,
                      double rho_k, DualRule rule);

/// One iteration of the splitting form over the consensus set: x and y are
/// kept as the single shared copy, v carries one dual block per (K_i, F_i).
StepOutput sipdfp_step(const IterTriple& z, const IterTriple& z_prev,
                       const std::vector<std::shared_ptr<const LinearMap>>& Ks,
                       const ProxFunction& prox_gstar,
                       const std::vector<std::shared_ptr<const ProxFunction>>& prox_fstars,
                       const StepMetric& metric, double alpha_k, double rho_k, DualRule rule);

/// Runs the appropriate iteration for the problem until the relative KM
/// residual drops below options.tol or the budget is exhausted. Aborts with
/// termination "diverged" if the residual grows by 1e6 over its initial
/// value.
SolveResult run(const CompositeProblem& problem, const StepMetric& metric,
                const InertialSchedule& schedule, const SolveOptions& options);

}  // namespace pdfp
