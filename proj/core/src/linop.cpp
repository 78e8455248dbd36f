#include "pdfp/linop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pdfp {

LinearMap::LinearMap(std::size_t in, std::size_t out) : in_dim_(in), out_dim_(out)
{
    if (in == 0 || out == 0)
        throw std::invalid_argument("LinearMap: dimensions must be positive");
}

DenseVector LinearMap::apply(const DenseVector& u) const
{
    if (u.size() != in_dim_)
        throw std::invalid_argument("LinearMap::apply: input length " + std::to_string(u.size()) +
                                    " does not match in_dim " + std::to_string(in_dim_));
    DenseVector out(out_dim_, 0.0);
    apply_impl(u, out);
    return out;
}

DenseVector LinearMap::adjoint_apply(const DenseVector& w) const
{
    if (w.size() != out_dim_)
        throw std::invalid_argument("LinearMap::adjoint_apply: input length " +
                                    std::to_string(w.size()) + " does not match out_dim " +
                                    std::to_string(out_dim_));
    DenseVector out(in_dim_, 0.0);
    adjoint_impl(w, out);
    return out;
}

void DiagonalMap::apply_impl(const DenseVector& u, DenseVector& out) const
{
    for (std::size_t i = 0; i < d_.size(); ++i)
        out[i] = d_[i] * u[i];
}

void DiagonalMap::adjoint_impl(const DenseVector& w, DenseVector& out) const
{
    for (std::size_t i = 0; i < d_.size(); ++i)
        out[i] = d_[i] * w[i];
}

DenseMatrixMap::DenseMatrixMap(std::size_t rows, std::size_t cols, std::vector<double> data)
    : LinearMap(cols, rows), data_(std::move(data))
{
    if (data_.size() != rows * cols)
        throw std::invalid_argument("DenseMatrixMap: data size " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
}

void DenseMatrixMap::apply_impl(const DenseVector& u, DenseVector& out) const
{
    const std::size_t r = rows(), c = cols();
    for (std::size_t i = 0; i < r; ++i) {
        double s = 0.0;
        const double* row = data_.data() + i * c;
        for (std::size_t j = 0; j < c; ++j)
            s += row[j] * u[j];
        out[i] = s;
    }
}

void DenseMatrixMap::adjoint_impl(const DenseVector& w, DenseVector& out) const
{
    const std::size_t r = rows(), c = cols();
    for (std::size_t i = 0; i < r; ++i) {
        const double* row = data_.data() + i * c;
        for (std::size_t j = 0; j < c; ++j)
            out[j] += row[j] * w[i];
    }
}

FirstDifference1D::FirstDifference1D(std::size_t n) : LinearMap(n, n - 1)
{
    if (n < 2)
        throw std::invalid_argument("FirstDifference1D: need at least 2 points");
}

void FirstDifference1D::apply_impl(const DenseVector& u, DenseVector& out) const
{
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        out[i] = u[i + 1] - u[i];
}

void FirstDifference1D::adjoint_impl(const DenseVector& w, DenseVector& out) const
{
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] -= w[i];
        out[i + 1] += w[i];
    }
}

FirstDifference2D::FirstDifference2D(std::size_t height, std::size_t width)
    : LinearMap(height * width, 2 * height * width), h_(height), w_(width)
{
}

void FirstDifference2D::apply_impl(const DenseVector& u, DenseVector& out) const
{
    const std::size_t n = h_ * w_;
    for (std::size_t r = 0; r < h_; ++r) {
        for (std::size_t c = 0; c < w_; ++c) {
            const std::size_t p = r * w_ + c;
            out[p] = (c + 1 < w_) ? u[p + 1] - u[p] : 0.0;        // horizontal
            out[n + p] = (r + 1 < h_) ? u[p + w_] - u[p] : 0.0;   // vertical
        }
    }
}

void FirstDifference2D::adjoint_impl(const DenseVector& w, DenseVector& out) const
{
    const std::size_t n = h_ * w_;
    for (std::size_t r = 0; r < h_; ++r) {
        for (std::size_t c = 0; c < w_; ++c) {
            const std::size_t p = r * w_ + c;
            if (c + 1 < w_) {
                out[p] -= w[p];
                out[p + 1] += w[p];
            }
            if (r + 1 < h_) {
                out[p] -= w[n + p];
                out[p + w_] += w[n + p];
            }
        }
    }
}

PermutationMap::PermutationMap(std::vector<std::size_t> perm)
    : LinearMap(perm.size(), perm.size()), perm_(std::move(perm)), inv_(perm_.size())
{
    std::vector<bool> seen(perm_.size(), false);
    for (std::size_t i = 0; i < perm_.size(); ++i) {
        if (perm_[i] >= perm_.size() || seen[perm_[i]])
            throw std::invalid_argument("PermutationMap: not a permutation");
        seen[perm_[i]] = true;
        inv_[perm_[i]] = i;
    }
}

void PermutationMap::apply_impl(const DenseVector& u, DenseVector& out) const
{
    for (std::size_t i = 0; i < perm_.size(); ++i)
        out[i] = u[perm_[i]];
}

void PermutationMap::adjoint_impl(const DenseVector& w, DenseVector& out) const
{
    for (std::size_t i = 0; i < inv_.size(); ++i)
        out[i] = w[inv_[i]];
}

ComposedMap::ComposedMap(std::shared_ptr<const LinearMap> outer,
                         std::shared_ptr<const LinearMap> inner)
    : LinearMap(inner->in_dim(), outer->out_dim()), outer_(std::move(outer)), inner_(std::move(inner))
{
    if (inner_->out_dim() != outer_->in_dim())
        throw std::invalid_argument("ComposedMap: inner out_dim " +
                                    std::to_string(inner_->out_dim()) +
                                    " does not match outer in_dim " +
                                    std::to_string(outer_->in_dim()));
}

void ComposedMap::apply_impl(const DenseVector& u, DenseVector& out) const
{
    out = outer_->apply(inner_->apply(u));
}

void ComposedMap::adjoint_impl(const DenseVector& w, DenseVector& out) const
{
    out = inner_->adjoint_apply(outer_->adjoint_apply(w));
}

std::size_t StackedMap::total_out(const std::vector<std::shared_ptr<const LinearMap>>& blocks)
{
    if (blocks.empty())
        throw std::invalid_argument("StackedMap: empty block list");
    std::size_t total = 0;
    for (const auto& b : blocks) {
        if (b->in_dim() != blocks.front()->in_dim())
            throw std::invalid_argument("StackedMap: blocks must share in_dim");
        total += b->out_dim();
    }
    return total;
}

StackedMap::StackedMap(std::vector<std::shared_ptr<const LinearMap>> blocks)
    : LinearMap(blocks.front()->in_dim(), total_out(blocks)), blocks_(std::move(blocks))
{
    std::size_t off = 0;
    for (const auto& b : blocks_) {
        offsets_.push_back(off);
        off += b->out_dim();
    }
}

void StackedMap::apply_impl(const DenseVector& u, DenseVector& out) const
{
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        DenseVector y = blocks_[k]->apply(u);
        std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(offsets_[k]));
    }
}

void StackedMap::adjoint_impl(const DenseVector& w, DenseVector& out) const
{
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        DenseVector wk(w.begin() + static_cast<std::ptrdiff_t>(offsets_[k]),
                       w.begin() + static_cast<std::ptrdiff_t>(offsets_[k] + blocks_[k]->out_dim()));
        DenseVector a = blocks_[k]->adjoint_apply(wk);
        for (std::size_t j = 0; j < a.size(); ++j)
            out[j] += a[j];
    }
}

NormEstimate estimate_norm(const LinearMap& K, double tol, std::size_t max_iter)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("estimate_norm: tol must be positive");

    // fixed-seed pseudo-random start: deterministic across runs, and unlike
    // the all-ones vector it is not orthogonal to the leading eigenvector of
    // structured operators (difference maps annihilate constants)
    const std::size_t n = K.in_dim();
    std::mt19937 gen(0x9e3779b9u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseVector u(n);
    for (auto& x : u)
        x = dist(gen);
    const double un = norm2(u);
    for (auto& x : u)
        x /= un;

    NormEstimate est;
    double lambda_prev = -1.0;
    for (std::size_t k = 0; k < max_iter; ++k) {
        DenseVector t = K.adjoint_apply(K.apply(u));
        const double lambda = dot(u, t);  // Rayleigh quotient of K*K, ||u|| = 1
        const double tn = norm2(t);
        est.iterations = k + 1;
        est.value = std::sqrt(std::max(lambda, 0.0));
        if (tn == 0.0) {
            // the seed vector lies in the kernel of K*K: treat as norm 0
            est.value = 0.0;
            est.converged = true;
            est.last_gap = 0.0;
            return est;
        }
        est.last_gap = std::abs(lambda - lambda_prev) / std::max(lambda, 1e-300);
        if (lambda_prev >= 0.0 && est.last_gap <= tol) {
            est.converged = true;
            return est;
        }
        lambda_prev = lambda;
        for (std::size_t i = 0; i < n; ++i)
            u[i] = t[i] / tn;
    }
    est.converged = false;
    return est;
}

}  // namespace pdfp
