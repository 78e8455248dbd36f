#pragma once

#include "pdfp/linop.hpp"
#include "pdfp/step.hpp"
#include "pdfp/vec.hpp"

#include <string>
#include <vector>

namespace pdfp {

/// Strictness shrink applied to diagonal metrics built from row/column
/// absolute-power sums: the construction guarantees the definiteness bound
/// only non-strictly.
inline constexpr double kDiagonalShrink = 1e-3;

/// A triple of proximal steps defining the block metric P: either three
/// positive scalars (sigma, gamma, tau) or three positive diagonals
/// (Sigma over the primal dim, Upsilon over the primal dim, T over the
/// dual dim). Solvers only accept metrics that passed validation.
class StepMetric {
public:
    enum class Mode { scalar, diagonal };

    StepMetric() = default;

    static StepMetric scalar(double sigma, double gamma, double tau);
    static StepMetric diagonal(std::vector<double> sigma, std::vector<double> gamma,
                               std::vector<double> tau);

    Mode mode() const { return mode_; }
    const StepSize& sigma() const { return sigma_; }
    const StepSize& gamma() const { return gamma_; }
    const StepSize& tau() const { return tau_; }

    /// 0 in scalar mode (any dim), the diagonal length otherwise.
    std::size_t primal_dim() const { return sigma_.size(); }
    std::size_t dual_dim() const { return tau_.size(); }

    bool validated() const { return validated_; }

private:
    Mode mode_ = Mode::scalar;
    StepSize sigma_{1.0};
    StepSize gamma_{1.0};
    StepSize tau_{1.0};
    bool validated_ = false;

    friend struct ValidationAccess;
};

struct ValidationReport {
    bool accepted = false;
    std::string message;
    /// 1 - (the validated quantity); positive iff accepted.
    double margin = 0.0;
    /// scalar/split: sigma*gamma + sigma*tau*sum||K_i||^2.
    double lhs = 0.0;
    /// diagonal: ||Sigma^1/2 Upsilon^1/2||^2, ||Sigma^1/2 K* T^1/2||^2,
    /// their sum, and ||Sigma^1/2 D M^1/2||^2 for D = (I, K*). Acceptance is
    /// decided on `combined`; the blockwise sum over-counts shared singular
    /// directions and is reported for reference only.
    double term_primal = 0.0;
    double term_coupling = 0.0;
    double term_sum = 0.0;
    double combined = 0.0;
    /// Validated copy of the metric when accepted.
    StepMetric metric;
};

/// Scalar step rule: accepts iff sigma, gamma, tau > 0 and
/// sigma*gamma + sigma*tau*normK^2 < 1. normK is used as given; callers
/// working from a power-iteration estimate should inflate it by kNormSafety
/// first.
ValidationReport validate_scalar(double sigma, double gamma, double tau, double normK);

/// Split form: sigma*gamma + sigma*tau*sum_i norms[i]^2 < 1.
ValidationReport validate_split(double sigma, double gamma, double tau,
                                const std::vector<double>& norms);

/// Builds a diagonal metric from the stacked operator D = [I; K]
/// ((n + rows(K)) x n): sigma_j = 1/sum_i |D_ij|^{2-s},
/// phi_i = 1/sum_j |D_ij|^s, with Upsilon the first n entries of phi and
/// T the rest, using the 0^0 = 0 convention; all three diagonals are then
/// shrunk by (1 - kDiagonalShrink). A zero row of D is rejected with its
/// index. The result is unvalidated; pass it through validate_diagonal.
StepMetric build_diagonal(const LinearMap& K, double s);

/// Definiteness gate for a diagonal metric: accepts iff
/// ||Sigma^1/2 D M^1/2||^2 < 1 for D = (I, K*), M = diag(Upsilon, T),
/// computed by power iteration (tol 1e-8) with a small safety inflation.
ValidationReport validate_diagonal(const StepMetric& metric, const LinearMap& K);

struct MetricTriple {
    DenseVector x;
    DenseVector y;
    DenseVector v;  // flattened dual blocks
};

/// <z, P z'> under the block metric P of a validated StepMetric.
double metric_inner(const StepMetric& metric, const LinearMap& K, const MetricTriple& z,
                    const MetricTriple& zp);

/// sqrt(<z, P z>); requires a validated metric so P is positive definite.
double metric_norm(const StepMetric& metric, const LinearMap& K, const MetricTriple& z);

}  // namespace pdfp
