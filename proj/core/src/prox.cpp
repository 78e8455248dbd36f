#include "pdfp/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdfp {

namespace {

double soft_threshold(double u, double t)
{
    if (u > t)
        return u - t;
    if (u < -t)
        return u + t;
    return 0.0;
}

/// log(1 + exp(-t)) without overflow.
double log1pexp_neg(double t)
{
    return t < 0.0 ? -t + std::log1p(std::exp(t)) : std::log1p(std::exp(-t));
}

}  // namespace

DenseVector ProxFunction::prox(const StepSize& lambda, const DenseVector& u) const
{
    lambda.require_positive("prox");
    lambda.require_dim(dim(), "prox");
    if (u.size() != dim())
        throw std::invalid_argument("prox: input length " + std::to_string(u.size()) +
                                    " does not match dim " + std::to_string(dim()));
    return prox_impl(lambda, u);
}

L1Norm::L1Norm(std::size_t n, double weight) : n_(n), weight_(weight)
{
    if (n == 0)
        throw std::invalid_argument("L1Norm: dim must be positive");
    if (!(weight > 0.0))
        throw std::invalid_argument("L1Norm: weight must be positive");
}

double L1Norm::eval(const DenseVector& u) const
{
    double s = 0.0;
    for (double x : u)
        s += std::abs(x);
    return weight_ * s;
}

DenseVector L1Norm::prox_impl(const StepSize& lambda, const DenseVector& u) const
{
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = soft_threshold(u[i], lambda.at(i) * weight_);
    return r;
}

L1Shifted::L1Shifted(DenseVector b, double weight) : b_(std::move(b)), weight_(weight)
{
    if (b_.empty())
        throw std::invalid_argument("L1Shifted: dim must be positive");
    if (!(weight > 0.0))
        throw std::invalid_argument("L1Shifted: weight must be positive");
}

double L1Shifted::eval(const DenseVector& u) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += std::abs(u[i] - b_[i]);
    return weight_ * s;
}

DenseVector L1Shifted::prox_impl(const StepSize& lambda, const DenseVector& u) const
{
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = b_[i] + soft_threshold(u[i] - b_[i], lambda.at(i) * weight_);
    return r;
}

QuadraticDistance::QuadraticDistance(DenseVector b, double weight) : b_(std::move(b)), weight_(weight)
{
    if (b_.empty())
        throw std::invalid_argument("QuadraticDistance: dim must be positive");
    if (!(weight > 0.0))
        throw std::invalid_argument("QuadraticDistance: weight must be positive");
}

double QuadraticDistance::eval(const DenseVector& u) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += (u[i] - b_[i]) * (u[i] - b_[i]);
    return 0.5 * weight_ * s;
}

DenseVector QuadraticDistance::prox_impl(const StepSize& lambda, const DenseVector& u) const
{
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double lw = lambda.at(i) * weight_;
        r[i] = (u[i] + lw * b_[i]) / (1.0 + lw);
    }
    return r;
}

BoxIndicator::BoxIndicator(std::size_t n, double lo, double hi) : n_(n), lo_(lo), hi_(hi)
{
    if (n == 0)
        throw std::invalid_argument("BoxIndicator: dim must be positive");
    if (!(lo < hi))
        throw std::invalid_argument("BoxIndicator: need lo < hi");
}

double BoxIndicator::eval(const DenseVector& u) const
{
    const double slack = kIndicatorTol * (1.0 + std::max(std::abs(lo_), std::abs(hi_)));
    for (double x : u)
        if (x < lo_ - slack || x > hi_ + slack)
            return std::numeric_limits<double>::infinity();
    return 0.0;
}

DenseVector BoxIndicator::prox_impl(const StepSize&, const DenseVector& u) const
{
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = std::clamp(u[i], lo_, hi_);
    return r;
}

GroupL2::GroupL2(std::size_t n, double weight) : n_(n), weight_(weight)
{
    if (n == 0 || n % 2 != 0)
        throw std::invalid_argument("GroupL2: dim must be positive and even, got " +
                                    std::to_string(n));
    if (!(weight > 0.0))
        throw std::invalid_argument("GroupL2: weight must be positive");
}

double GroupL2::eval(const DenseVector& u) const
{
    double s = 0.0;
    for (std::size_t g = 0; g < u.size(); g += 2)
        s += std::hypot(u[g], u[g + 1]);
    return weight_ * s;
}

DenseVector GroupL2::prox_impl(const StepSize& lambda, const DenseVector& u) const
{
    DenseVector r(u.size());
    for (std::size_t g = 0; g < u.size(); g += 2) {
        const double t = lambda.uniform(g, 2) * weight_;
        const double nrm = std::hypot(u[g], u[g + 1]);
        const double scale = nrm > t ? 1.0 - t / nrm : 0.0;  // 0 at the singular pair
        r[g] = scale * u[g];
        r[g + 1] = scale * u[g + 1];
    }
    return r;
}

double prox_logistic(double lambda, double u, double y, double c, bool* used_fallback)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("prox_logistic: lambda must be positive");
    if (!(c > 0.0))
        throw std::invalid_argument("prox_logistic: weight must be positive");
    if (y != 1.0 && y != -1.0)
        throw std::invalid_argument("prox_logistic: label must be +1 or -1");
    if (used_fallback)
        *used_fallback = false;

    const double lc = lambda * c;
    // g(t) = t - u - lc*y/(1+e^{yt}) is strictly increasing; the root lies in
    // [u - lc, u + lc].
    double lo = u - lc, hi = u + lc;
    const auto g = [&](double t) {
        const double yt = y * t;
        // y/(1+e^{yt}) computed stably for large |yt|
        double s;
        if (yt > 0.0)
            s = std::exp(-yt) / (1.0 + std::exp(-yt));
        else
            s = 1.0 / (1.0 + std::exp(yt));
        return t - u - lc * y * s;
    };

    double t = u;  // lambda -> 0 limit
    const double tol = 1e-12;
    bool newton_ok = false;
    for (int it = 0; it < 100; ++it) {
        const double gt = g(t);
        if (gt > 0.0)
            hi = t;
        else
            lo = t;
        if (std::abs(gt) <= tol || hi - lo <= tol) {
            newton_ok = true;
            break;
        }
        const double yt = y * t;
        const double e = std::exp(-std::abs(yt));
        const double dsig = e / ((1.0 + e) * (1.0 + e));  // e^{yt}/(1+e^{yt})^2
        const double gp = 1.0 + lc * dsig;
        double next = t - gt / gp;
        if (!(next > lo) || !(next < hi))
            next = 0.5 * (lo + hi);  // safeguard: bisect inside the bracket
        t = next;
    }
    if (!newton_ok) {
        // refine by plain bisection and flag it
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0)
                hi = mid;
            else
                lo = mid;
        }
        t = 0.5 * (lo + hi);
        if (used_fallback)
            *used_fallback = true;
    }
    return t;
}

LogisticLoss::LogisticLoss(std::vector<double> labels, double weight)
    : labels_(std::move(labels)), weight_(weight)
{
    if (labels_.empty())
        throw std::invalid_argument("LogisticLoss: empty label list");
    if (!(weight > 0.0))
        throw std::invalid_argument("LogisticLoss: weight must be positive");
    for (double y : labels_)
        if (y != 1.0 && y != -1.0)
            throw std::invalid_argument("LogisticLoss: labels must be +1 or -1");
}

double LogisticLoss::eval(const DenseVector& u) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += log1pexp_neg(labels_[i] * u[i]);
    return weight_ * s;
}

DenseVector LogisticLoss::prox_impl(const StepSize& lambda, const DenseVector& u) const
{
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = prox_logistic(lambda.at(i), u[i], labels_[i], weight_);
    return r;
}

ConsensusIndicator::ConsensusIndicator(std::size_t blocks, std::size_t block_len)
    : m_(blocks), n_(block_len)
{
    if (blocks == 0 || block_len == 0)
        throw std::invalid_argument("ConsensusIndicator: block count and length must be positive");
}

double ConsensusIndicator::eval(const DenseVector& u) const
{
    double scale = 0.0;
    for (double x : u)
        scale = std::max(scale, std::abs(x));
    for (std::size_t b = 1; b < m_; ++b)
        for (std::size_t j = 0; j < n_; ++j)
            if (std::abs(u[b * n_ + j] - u[j]) > kIndicatorTol * (1.0 + scale))
                return std::numeric_limits<double>::infinity();
    return 0.0;
}

DenseVector ConsensusIndicator::prox_impl(const StepSize&, const DenseVector& u) const
{
    DenseVector mean(n_, 0.0);
    for (std::size_t b = 0; b < m_; ++b)
        for (std::size_t j = 0; j < n_; ++j)
            mean[j] += u[b * n_ + j];
    for (double& x : mean)
        x /= static_cast<double>(m_);
    DenseVector r(u.size());
    for (std::size_t b = 0; b < m_; ++b)
        std::copy(mean.begin(), mean.end(), r.begin() + static_cast<std::ptrdiff_t>(b * n_));
    return r;
}

BlockSeparable::BlockSeparable(std::vector<std::shared_ptr<const ProxFunction>> parts)
    : parts_(std::move(parts))
{
    if (parts_.empty())
        throw std::invalid_argument("BlockSeparable: empty part list");
    for (const auto& p : parts_) {
        offsets_.push_back(total_);
        total_ += p->dim();
    }
}

bool BlockSeparable::has_eval() const
{
    for (const auto& p : parts_)
        if (!p->has_eval())
            return false;
    return true;
}

double BlockSeparable::eval(const DenseVector& u) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        DenseVector ui(u.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                       u.begin() + static_cast<std::ptrdiff_t>(offsets_[i] + parts_[i]->dim()));
        s += parts_[i]->eval(ui);
    }
    return s;
}

DenseVector BlockSeparable::prox_impl(const StepSize& lambda, const DenseVector& u) const
{
    DenseVector r(u.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        const std::size_t off = offsets_[i], len = parts_[i]->dim();
        DenseVector ui(u.begin() + static_cast<std::ptrdiff_t>(off),
                       u.begin() + static_cast<std::ptrdiff_t>(off + len));
        DenseVector pi = parts_[i]->prox(lambda.slice(off, len), ui);
        std::copy(pi.begin(), pi.end(), r.begin() + static_cast<std::ptrdiff_t>(off));
    }
    return r;
}

ConjugateProx::ConjugateProx(std::shared_ptr<const ProxFunction> f) : f_(std::move(f))
{
    if (!f_)
        throw std::invalid_argument("ConjugateProx: null function");
}

double ConjugateProx::eval(const DenseVector&) const
{
    throw std::logic_error("ConjugateProx: conjugate values are not evaluated");
}

DenseVector ConjugateProx::prox_impl(const StepSize& lambda, const DenseVector& u) const
{
    // conjugate of the zero function is the indicator of {0}
    if (dynamic_cast<const ZeroFunction*>(f_.get()))
        return zeros(u.size());

    const StepSize inv = lambda.reciprocal();
    DenseVector scaled(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        scaled[i] = u[i] / lambda.at(i);
    DenseVector p = f_->prox(inv, scaled);
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = u[i] - lambda.at(i) * p[i];
    return r;
}

DenseVector prox_conjugate(const ProxFunction& f, const StepSize& lambda, const DenseVector& u)
{
    lambda.require_positive("prox_conjugate");
    lambda.require_dim(f.dim(), "prox_conjugate");
    if (u.size() != f.dim())
        throw std::invalid_argument("prox_conjugate: dimension mismatch");

    if (dynamic_cast<const ZeroFunction*>(&f))
        return zeros(u.size());

    const StepSize inv = lambda.reciprocal();
    DenseVector scaled(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        scaled[i] = u[i] / lambda.at(i);
    DenseVector p = f.prox(inv, scaled);
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = u[i] - lambda.at(i) * p[i];
    return r;
}

DenseVector clamp_linf(const DenseVector& u, double weight)
{
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = std::clamp(u[i], -weight, weight);
    return r;
}

std::vector<DenseVector> project_consensus(const std::vector<DenseVector>& blocks)
{
    if (blocks.empty())
        throw std::invalid_argument("project_consensus: empty block list");
    const std::size_t n = blocks.front().size();
    DenseVector mean(n, 0.0);
    for (const auto& b : blocks) {
        if (b.size() != n)
            throw std::invalid_argument("project_consensus: blocks must share length");
        for (std::size_t j = 0; j < n; ++j)
            mean[j] += b[j];
    }
    for (double& x : mean)
        x /= static_cast<double>(blocks.size());
    return std::vector<DenseVector>(blocks.size(), mean);
}

}  // namespace pdfp
