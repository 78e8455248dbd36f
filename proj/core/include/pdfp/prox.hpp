#pragma once

#include "pdfp/step.hpp"
#include "pdfp/vec.hpp"

#include <limits>
#include <memory>
#include <vector>

namespace pdfp {

/// Feasibility slack used when evaluating indicator functions: iterates
/// produced through a dual update satisfy constraints only approximately.
inline constexpr double kIndicatorTol = 1e-8;

/// A convex function exposing prox_{lambda f} and, where available, plain
/// evaluation. All catalog entries are pure functions of their inputs.
class ProxFunction {
public:
    virtual ~ProxFunction() = default;

    virtual std::size_t dim() const = 0;

    /// prox_{lambda f}(u). lambda is a positive scalar or positive diagonal;
    /// separable entries consume a diagonal componentwise, non-separable
    /// ones require it constant on each of their blocks.
    DenseVector prox(const StepSize& lambda, const DenseVector& u) const;

    virtual bool has_eval() const { return true; }
    virtual double eval(const DenseVector& u) const = 0;

protected:
    virtual DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const = 0;
};

/// f = 0; prox is the identity.
class ZeroFunction final : public ProxFunction {
public:
    explicit ZeroFunction(std::size_t n) : n_(n) {}
    std::size_t dim() const override { return n_; }
    double eval(const DenseVector&) const override { return 0.0; }

protected:
    DenseVector prox_impl(const StepSize&, const DenseVector& u) const override { return u; }

private:
    std::size_t n_;
};

/// f(x) = weight * ||x||_1.
class L1Norm final : public ProxFunction {
public:
    L1Norm(std::size_t n, double weight = 1.0);
    std::size_t dim() const override { return n_; }
    double weight() const { return weight_; }
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    std::size_t n_;
    double weight_;
};

/// f(x) = weight * ||x - b||_1.
class L1Shifted final : public ProxFunction {
public:
    L1Shifted(DenseVector b, double weight = 1.0);
    std::size_t dim() const override { return b_.size(); }
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    DenseVector b_;
    double weight_;
};

/// f(x) = (weight/2) * ||x - b||^2.
class QuadraticDistance final : public ProxFunction {
public:
    QuadraticDistance(DenseVector b, double weight = 1.0);
    std::size_t dim() const override { return b_.size(); }
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    DenseVector b_;
    double weight_;
};

/// Indicator of the box [lo, hi]^n; prox is the clamp, independent of lambda.
class BoxIndicator final : public ProxFunction {
public:
    BoxIndicator(std::size_t n, double lo, double hi);
    std::size_t dim() const override { return n_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    std::size_t n_;
    double lo_;
    double hi_;
};

/// Isotropic TV atom: weight * sum of l2 norms of adjacent coordinate
/// pairs (u_0,u_1), (u_2,u_3), ... The step must be constant per pair.
class GroupL2 final : public ProxFunction {
public:
    GroupL2(std::size_t n, double weight = 1.0);
    std::size_t dim() const override { return n_; }
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    std::size_t n_;
    double weight_;
};

/// Solves t = argmin_t lambda*c*log(1 + exp(-y t)) + (t-u)^2/2 by
/// safeguarded Newton on the optimality equation t = u + lambda*c*y/(1+e^{yt}),
/// bisecting on the bracket [u - lambda*c, u + lambda*c] whenever a Newton
/// step leaves it. Absolute tolerance 1e-12. *used_fallback (optional) is set
/// when Newton fails to settle within 100 iterations and the bisection
/// result is returned.
double prox_logistic(double lambda, double u, double y, double c, bool* used_fallback = nullptr);

/// f(t) = c * sum_i log(1 + exp(-y_i t_i)), the weighted logistic loss of a
/// batch with labels y_i in {-1,+1}.
class LogisticLoss final : public ProxFunction {
public:
    LogisticLoss(std::vector<double> labels, double weight);
    std::size_t dim() const override { return labels_.size(); }
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    std::vector<double> labels_;
    double weight_;
};

/// Indicator of the consensus set {(x_1,...,x_m): all blocks equal} over m
/// stacked blocks of length n; prox is block averaging.
class ConsensusIndicator final : public ProxFunction {
public:
    ConsensusIndicator(std::size_t blocks, std::size_t block_len);
    std::size_t dim() const override { return m_ * n_; }
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    std::size_t m_;
    std::size_t n_;
};

/// Block-separable sum f(u) = sum_i f_i(u_i) over consecutive slices.
class BlockSeparable final : public ProxFunction {
public:
    explicit BlockSeparable(std::vector<std::shared_ptr<const ProxFunction>> parts);
    std::size_t dim() const override { return total_; }
    std::size_t block_count() const { return parts_.size(); }
    std::size_t block_offset(std::size_t i) const { return offsets_.at(i); }
    const ProxFunction& part(std::size_t i) const { return *parts_.at(i); }
    bool has_eval() const override;
    double eval(const DenseVector& u) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    std::vector<std::shared_ptr<const ProxFunction>> parts_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

/// prox of the Legendre-Fenchel conjugate f*, obtained through the Moreau
/// identity prox_{lambda f*}(u) = u - lambda . prox_{f/lambda}(u/lambda).
class ConjugateProx final : public ProxFunction {
public:
    explicit ConjugateProx(std::shared_ptr<const ProxFunction> f);
    std::size_t dim() const override { return f_->dim(); }
    bool has_eval() const override { return false; }
    double eval(const DenseVector&) const override;

protected:
    DenseVector prox_impl(const StepSize& lambda, const DenseVector& u) const override;

private:
    std::shared_ptr<const ProxFunction> f_;
};

/// One-shot form of ConjugateProx.
DenseVector prox_conjugate(const ProxFunction& f, const StepSize& lambda, const DenseVector& u);

/// Closed-form prox of (weight*||.||_1)*, the indicator of the weighted
/// l-infinity ball: componentwise clamp to [-weight, weight]. Kept as an
/// independent cross-check of the Moreau route.
DenseVector clamp_linf(const DenseVector& u, double weight);

/// Projects m equally sized blocks onto the consensus set: every output
/// block is the componentwise mean of the inputs.
std::vector<DenseVector> project_consensus(const std::vector<DenseVector>& blocks);

}  // namespace pdfp
