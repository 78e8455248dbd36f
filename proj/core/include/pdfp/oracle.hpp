#pragma once

#include "pdfp/linop.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/prox.hpp"
#include "pdfp/vec.hpp"

#include <functional>

namespace pdfp {
namespace oracle {

struct GridSpec {
    double lo;
    double hi;
    double pitch;
};

struct GridProxResult {
    DenseVector point;
    /// Set when the grid minimizer lies on the boundary, i.e. the grid is
    /// too coarse or too narrow to bracket the true prox.
    bool on_boundary = false;
};

/// Exhaustive grid argmin of lambda*f(y) + 0.5*||u - y||^2 for dim <= 2.
/// Ties break toward the lexicographically smallest grid point.
GridProxResult prox_oracle(const std::function<double(const DenseVector&)>& f, double lambda,
                           const DenseVector& u, const GridSpec& grid);

struct ReferenceSolution {
    DenseVector x;
    double objective = 0.0;
    std::size_t iterations = 0;
    /// Budget exhausted with the step residual still above 1e-10.
    bool low_confidence = false;
};

/// High-accuracy ground truth for desk-scale problems: a deliberately
/// independent primal-dual loop (no inertia, unit relaxation, primal-point
/// dual rule, conservative scalar steps at definiteness margin 0.5) that
/// shares the prox catalog but none of the solver's iteration code. Returns
/// the best-objective iterate seen.
ReferenceSolution reference_solve(const CompositeProblem& problem, std::size_t budget = 200000,
                                  DenseVector x0 = {});

/// One standard Chambolle-Pock iteration
///   x' = prox_{sigma H}(x - sigma K* v),  v' = prox_{tau F*}(v + tau K(2x' - x)),
/// coded independently of the solver module; used for the equivalence test.
void cp_reference_step(DenseVector& x, DenseVector& v, const LinearMap& K,
                       const ProxFunction& prox_h, const ProxFunction& prox_fstar, double sigma,
                       double tau);

/// Long-run proximal-gradient (ISTA) reference for l1-regularized logistic
/// regression; second independent check of the logistic toy objective.
ReferenceSolution logreg_prox_grad(const LogRegDataset& data, double tau, std::size_t iters);

}  // namespace oracle
}  // namespace pdfp
