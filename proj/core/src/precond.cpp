#include "pdfp/precond.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdfp {

struct ValidationAccess {
    static StepMetric validated_copy(const StepMetric& m)
    {
        StepMetric c = m;
        c.validated_ = true;
        return c;
    }
};

namespace {

/// |a|^p with the 0^0 = 0 convention: zero entries never contribute.
double abs_pow(double a, double p)
{
    const double aa = std::abs(a);
    if (aa == 0.0)
        return 0.0;
    if (p == 0.0)
        return 1.0;
    return std::pow(aa, p);
}

/// Inflation applied to the power-iteration estimate in validate_diagonal.
/// Sized to the iteration tolerance: the Lemma-4.4 construction sits at
/// distance kDiagonalShrink from the bound, so the guard must stay well
/// below that.
constexpr double kDiagInflation = 1.0 + 1e-6;
constexpr double kDiagPowerTol = 1e-8;

/// Sigma^1/2 K* T^1/2 as an operator, dual -> primal.
class ScaledCoupling final : public LinearMap {
public:
    ScaledCoupling(const LinearMap& K, const std::vector<double>& sqrt_sigma,
                   const std::vector<double>& sqrt_tau)
        : LinearMap(K.out_dim(), K.in_dim()), K_(K), ss_(sqrt_sigma), st_(sqrt_tau)
    {
    }

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override
    {
        DenseVector t(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            t[i] = st_[i] * u[i];
        DenseVector a = K_.adjoint_apply(t);
        for (std::size_t j = 0; j < a.size(); ++j)
            out[j] = ss_[j] * a[j];
    }

    void adjoint_impl(const DenseVector& w, DenseVector& out) const override
    {
        DenseVector t(w.size());
        for (std::size_t j = 0; j < w.size(); ++j)
            t[j] = ss_[j] * w[j];
        DenseVector a = K_.apply(t);
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = st_[i] * a[i];
    }

    const LinearMap& K_;
    const std::vector<double>& ss_;
    const std::vector<double>& st_;
};

/// Sigma^1/2 D M^1/2 for D = (I, K*), M = diag(Upsilon, T):
/// (a, b) -> Sigma^1/2 (Upsilon^1/2 a + K* T^1/2 b).
class CombinedCoupling final : public LinearMap {
public:
    CombinedCoupling(const LinearMap& K, const std::vector<double>& sqrt_sigma,
                     const std::vector<double>& sqrt_gamma, const std::vector<double>& sqrt_tau)
        : LinearMap(K.in_dim() + K.out_dim(), K.in_dim()),
          K_(K),
          ss_(sqrt_sigma),
          sg_(sqrt_gamma),
          st_(sqrt_tau)
    {
    }

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override
    {
        const std::size_t n = K_.in_dim();
        DenseVector b(u.begin() + static_cast<std::ptrdiff_t>(n), u.end());
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] *= st_[i];
        DenseVector a = K_.adjoint_apply(b);
        for (std::size_t j = 0; j < n; ++j)
            out[j] = ss_[j] * (sg_[j] * u[j] + a[j]);
    }

    void adjoint_impl(const DenseVector& w, DenseVector& out) const override
    {
        const std::size_t n = K_.in_dim();
        DenseVector sw(n);
        for (std::size_t j = 0; j < n; ++j)
            sw[j] = ss_[j] * w[j];
        for (std::size_t j = 0; j < n; ++j)
            out[j] = sg_[j] * sw[j];
        DenseVector kv = K_.apply(sw);
        for (std::size_t i = 0; i < kv.size(); ++i)
            out[n + i] = st_[i] * kv[i];
    }

    const LinearMap& K_;
    const std::vector<double>& ss_;
    const std::vector<double>& sg_;
    const std::vector<double>& st_;
};

std::vector<double> sqrt_each(const std::vector<double>& v)
{
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        r[i] = std::sqrt(v[i]);
    return r;
}

bool all_positive(const std::vector<double>& v)
{
    for (double x : v)
        if (!(x > 0.0) || !std::isfinite(x))
            return false;
    return true;
}

}  // namespace

StepMetric StepMetric::scalar(double sigma, double gamma, double tau)
{
    StepMetric m;
    m.mode_ = Mode::scalar;
    m.sigma_ = StepSize(sigma);
    m.gamma_ = StepSize(gamma);
    m.tau_ = StepSize(tau);
    return m;
}

StepMetric StepMetric::diagonal(std::vector<double> sigma, std::vector<double> gamma,
                                std::vector<double> tau)
{
    if (sigma.size() != gamma.size())
        throw std::invalid_argument("StepMetric::diagonal: sigma and gamma must share the primal dim");
    if (sigma.empty() || tau.empty())
        throw std::invalid_argument("StepMetric::diagonal: empty diagonal");
    StepMetric m;
    m.mode_ = Mode::diagonal;
    m.sigma_ = StepSize(std::move(sigma));
    m.gamma_ = StepSize(std::move(gamma));
    m.tau_ = StepSize(std::move(tau));
    return m;
}

ValidationReport validate_scalar(double sigma, double gamma, double tau, double normK)
{
    return validate_split(sigma, gamma, tau, {normK});
}

ValidationReport validate_split(double sigma, double gamma, double tau,
                                const std::vector<double>& norms)
{
    ValidationReport rep;
    if (!(sigma > 0.0) || !(gamma > 0.0) || !(tau > 0.0)) {
        rep.message = "rejected: steps must be strictly positive";
        return rep;
    }
    double sum_sq = 0.0;
    for (double n : norms)
        sum_sq += n * n;
    rep.lhs = sigma * gamma + sigma * tau * sum_sq;
    rep.margin = 1.0 - rep.lhs;
    if (rep.lhs < 1.0) {
        rep.accepted = true;
        rep.message = "accepted";
        rep.metric = ValidationAccess::validated_copy(StepMetric::scalar(sigma, gamma, tau));
    } else {
        rep.message = "rejected: sigma*gamma + sigma*tau*sum||K_i||^2 = " + std::to_string(rep.lhs) +
                      " >= 1";
    }
    return rep;
}

StepMetric build_diagonal(const LinearMap& K, double s)
{
    if (!(s >= 0.0 && s <= 2.0))
        throw std::invalid_argument("build_diagonal: s must lie in [0, 2], got " +
                                    std::to_string(s));

    const std::size_t n = K.in_dim();
    const std::size_t md = K.out_dim();

    // column sums of |D|^{2-s} and row sums of |D|^s for D = [I; K],
    // materializing K one column at a time
    std::vector<double> col_sum(n, 1.0);  // identity contributes 1 per column
    std::vector<double> row_sum(md, 0.0);
    DenseVector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        DenseVector col = K.apply(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < md; ++i) {
            col_sum[j] += abs_pow(col[i], 2.0 - s);
            row_sum[i] += abs_pow(col[i], s);
        }
    }

    const double shrink = 1.0 - kDiagonalShrink;
    std::vector<double> sigma(n), gamma(n, shrink), tau(md);
    for (std::size_t j = 0; j < n; ++j)
        sigma[j] = shrink / col_sum[j];  // col_sum >= 1 from the identity block
    for (std::size_t i = 0; i < md; ++i) {
        // a zero row of K decouples its dual coordinate entirely; any
        // positive step keeps the metric definite, so treat the row sum as 1
        // (difference operators have such rows at the boundary)
        tau[i] = row_sum[i] == 0.0 ? shrink : shrink / row_sum[i];
    }
    // rows of the identity block give phi_i = 1, i.e. Upsilon = I pre-shrink
    return StepMetric::diagonal(std::move(sigma), std::move(gamma), std::move(tau));
}

ValidationReport validate_diagonal(const StepMetric& metric, const LinearMap& K)
{
    ValidationReport rep;
    if (metric.mode() != StepMetric::Mode::diagonal) {
        rep.message = "rejected: not a diagonal metric (use validate_scalar)";
        return rep;
    }
    const auto& sigma = metric.sigma().diagonal();
    const auto& gamma = metric.gamma().diagonal();
    const auto& tau = metric.tau().diagonal();
    if (sigma.size() != K.in_dim() || tau.size() != K.out_dim()) {
        rep.message = "rejected: metric dims (" + std::to_string(sigma.size()) + ", " +
                      std::to_string(tau.size()) + ") do not match operator (" +
                      std::to_string(K.in_dim()) + ", " + std::to_string(K.out_dim()) + ")";
        return rep;
    }
    if (!all_positive(sigma) || !all_positive(gamma) || !all_positive(tau)) {
        rep.message = "rejected: diagonals must be strictly positive and finite";
        return rep;
    }

    const auto ss = sqrt_each(sigma);
    const auto sg = sqrt_each(gamma);
    const auto st = sqrt_each(tau);

    for (std::size_t j = 0; j < sigma.size(); ++j)
        rep.term_primal = std::max(rep.term_primal, sigma[j] * gamma[j]);

    const ScaledCoupling coupling(K, ss, st);
    const NormEstimate cn = estimate_norm(coupling, kDiagPowerTol);
    rep.term_coupling = cn.value * cn.value;
    rep.term_sum = rep.term_primal + rep.term_coupling;

    const CombinedCoupling combined(K, ss, sg, st);
    const NormEstimate bn = estimate_norm(combined, kDiagPowerTol);
    const double inflated = bn.value * kDiagInflation;
    rep.combined = inflated * inflated;
    rep.margin = 1.0 - rep.combined;

    if (rep.combined < 1.0) {
        rep.accepted = true;
        rep.message = "accepted";
        rep.metric = ValidationAccess::validated_copy(metric);
    } else {
        rep.message = "rejected: ||Sigma^1/2 D M^1/2||^2 = " + std::to_string(rep.combined) +
                      " >= 1";
    }
    return rep;
}

double metric_inner(const StepMetric& metric, const LinearMap& K, const MetricTriple& z,
                    const MetricTriple& zp)
{
    if (!metric.validated())
        throw std::logic_error("metric_inner: metric has not been validated");
    if (z.x.size() != zp.x.size() || z.y.size() != zp.y.size() || z.v.size() != zp.v.size())
        throw std::invalid_argument("metric_inner: triple dims differ");
    if (z.x.size() != K.in_dim() || z.v.size() != K.out_dim() || z.y.size() != z.x.size())
        throw std::invalid_argument("metric_inner: triple dims do not match the operator");

    const StepSize& sigma = metric.sigma();
    const StepSize& gamma = metric.gamma();
    const StepSize& tau = metric.tau();

    double s = 0.0;
    for (std::size_t j = 0; j < z.x.size(); ++j)
        s += z.x[j] * zp.x[j] / sigma.at(j) + z.y[j] * zp.y[j] / gamma.at(j);
    for (std::size_t i = 0; i < z.v.size(); ++i)
        s += z.v[i] * zp.v[i] / tau.at(i);
    s -= dot(z.x, zp.y) + dot(zp.x, z.y);
    s -= dot(K.apply(z.x), zp.v) + dot(K.apply(zp.x), z.v);
    return s;
}

double metric_norm(const StepMetric& metric, const LinearMap& K, const MetricTriple& z)
{
    return std::sqrt(std::max(metric_inner(metric, K, z, z), 0.0));
}

}  // namespace pdfp
