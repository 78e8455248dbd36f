#pragma once

#include "pdfp/vec.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace pdfp {

/// Abstract linear operator with forward and adjoint application.
/// Operators are immutable after construction and safe for concurrent
/// read-only use.
class LinearMap {
public:
    virtual ~LinearMap() = default;

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }

    DenseVector apply(const DenseVector& u) const;
    DenseVector adjoint_apply(const DenseVector& w) const;

protected:
    LinearMap(std::size_t in, std::size_t out);

    virtual void apply_impl(const DenseVector& u, DenseVector& out) const = 0;
    virtual void adjoint_impl(const DenseVector& w, DenseVector& out) const = 0;

private:
    std::size_t in_dim_;
    std::size_t out_dim_;
};

class IdentityMap final : public LinearMap {
public:
    explicit IdentityMap(std::size_t n) : LinearMap(n, n) {}

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override { out = u; }
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override { out = w; }
};

class DiagonalMap final : public LinearMap {
public:
    explicit DiagonalMap(std::vector<double> d) : LinearMap(d.size(), d.size()), d_(std::move(d)) {}

    const std::vector<double>& diagonal() const { return d_; }

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override;
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override;

    std::vector<double> d_;
};

/// Row-major dense matrix.
class DenseMatrixMap final : public LinearMap {
public:
    DenseMatrixMap(std::size_t rows, std::size_t cols, std::vector<double> data);

    double entry(std::size_t i, std::size_t j) const { return data_[i * in_dim() + j]; }
    std::size_t rows() const { return out_dim(); }
    std::size_t cols() const { return in_dim(); }

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override;
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override;

    std::vector<double> data_;
};

/// Forward difference on a 1-D signal, n -> n-1. Row i is x[i+1] - x[i].
class FirstDifference1D final : public LinearMap {
public:
    explicit FirstDifference1D(std::size_t n);

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override;
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override;
};

/// Forward differences of a row-major h x w image with Neumann boundary
/// (zero difference at the last column/row). Output stacks the h*w
/// horizontal differences, then the h*w vertical ones.
class FirstDifference2D final : public LinearMap {
public:
    FirstDifference2D(std::size_t height, std::size_t width);

    std::size_t height() const { return h_; }
    std::size_t width() const { return w_; }

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override;
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override;

    std::size_t h_;
    std::size_t w_;
};

/// Reorders coordinates: out[i] = u[perm[i]]. Adjoint is the inverse
/// permutation.
class PermutationMap final : public LinearMap {
public:
    explicit PermutationMap(std::vector<std::size_t> perm);

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override;
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override;

    std::vector<std::size_t> perm_;
    std::vector<std::size_t> inv_;
};

/// Composition A(B(x)).
class ComposedMap final : public LinearMap {
public:
    ComposedMap(std::shared_ptr<const LinearMap> outer, std::shared_ptr<const LinearMap> inner);

private:
    void apply_impl(const DenseVector& u, DenseVector& out) const override;
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override;

    std::shared_ptr<const LinearMap> outer_;
    std::shared_ptr<const LinearMap> inner_;
};

/// Vertical stack of operators sharing the input space; the output
/// concatenates the block outputs in order.
class StackedMap final : public LinearMap {
public:
    explicit StackedMap(std::vector<std::shared_ptr<const LinearMap>> blocks);

    std::size_t block_count() const { return blocks_.size(); }
    const LinearMap& block(std::size_t i) const { return *blocks_.at(i); }
    std::size_t block_offset(std::size_t i) const { return offsets_.at(i); }

private:
    static std::size_t total_out(const std::vector<std::shared_ptr<const LinearMap>>& blocks);

    void apply_impl(const DenseVector& u, DenseVector& out) const override;
    void adjoint_impl(const DenseVector& w, DenseVector& out) const override;

    std::vector<std::shared_ptr<const LinearMap>> blocks_;
    std::vector<std::size_t> offsets_;
};

/// Safety factor applied to power-iteration norm estimates before they
/// enter a step-size validity check; power iteration approaches the norm
/// from below.
inline constexpr double kNormSafety = 1.01;

struct NormEstimate {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// |last Rayleigh change| relative to the estimate, at the final iterate.
    double last_gap = 0.0;
};

/// Estimates ||K|| by power iteration on K*K, starting from the normalized
/// all-ones vector so results are reproducible across runs.
NormEstimate estimate_norm(const LinearMap& K, double tol = 1e-8, std::size_t max_iter = 10000);

}  // namespace pdfp
