#include "pdfp/problems.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pdfp {

namespace {

double stable_logistic_term(double yt)
{
    // log(1 + exp(-yt))
    return yt < 0.0 ? -yt + std::log1p(std::exp(yt)) : std::log1p(std::exp(-yt));
}

}  // namespace

double CompositeProblem::objective(const DenseVector& x) const
{
    if (x.size() != primal_dim)
        throw std::invalid_argument("objective: input length " + std::to_string(x.size()) +
                                    " does not match primal dim " + std::to_string(primal_dim));
    return objective_fn(x);
}

void CompositeProblem::check() const
{
    if (primal_dim == 0)
        throw std::invalid_argument("CompositeProblem: primal_dim must be positive");
    if (blocks.empty())
        throw std::invalid_argument("CompositeProblem: at least one block required");
    for (const auto& b : blocks) {
        if (!b.K || !b.F)
            throw std::invalid_argument("CompositeProblem: null block component");
        if (b.K->in_dim() != primal_dim)
            throw std::invalid_argument("CompositeProblem: block operator in_dim mismatch");
        if (b.K->out_dim() != b.F->dim())
            throw std::invalid_argument("CompositeProblem: block prox dim mismatch");
    }
    if (G && G->dim() != primal_dim)
        throw std::invalid_argument("CompositeProblem: G dim mismatch");
    if (H && H->dim() != primal_dim)
        throw std::invalid_argument("CompositeProblem: H dim mismatch");
    if (!objective_fn)
        throw std::invalid_argument("CompositeProblem: missing objective");
}

void LogRegDataset::check() const
{
    if (features.empty())
        throw std::invalid_argument("LogRegDataset: empty dataset");
    if (features.size() != labels.size())
        throw std::invalid_argument("LogRegDataset: feature/label count mismatch");
    if (q == 0)
        throw std::invalid_argument("LogRegDataset: feature count must be positive");
    for (const auto& row : features)
        if (row.size() != q)
            throw std::invalid_argument("LogRegDataset: ragged feature row");
    for (double y : labels)
        if (y != 1.0 && y != -1.0)
            throw std::invalid_argument("LogRegDataset: labels must be +1 or -1");
}

CompositeProblem build_l1tv(const DenseVector& image, std::size_t height, std::size_t width,
                            double lambda_tv, bool isotropic, double box_lo, double box_hi)
{
    if (height == 0 || width == 0)
        throw std::invalid_argument("build_l1tv: image dims must be positive");
    const std::size_t n = height * width;
    if (image.size() != n)
        throw std::invalid_argument("build_l1tv: image length does not match h*w");
    if (!(lambda_tv > 0.0))
        throw std::invalid_argument("build_l1tv: lambda_tv must be positive");

    CompositeProblem p;
    p.primal_dim = n;

    auto box = std::make_shared<BoxIndicator>(n, box_lo, box_hi);
    p.blocks.push_back({std::make_shared<IdentityMap>(n), box});

    auto diff = std::make_shared<FirstDifference2D>(height, width);
    std::shared_ptr<const LinearMap> tv_op = diff;
    std::shared_ptr<const ProxFunction> tv_atom;
    if (isotropic) {
        // interleave (horizontal_i, vertical_i) so the group prox sees
        // adjacent pairs
        std::vector<std::size_t> perm(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            perm[2 * i] = i;
            perm[2 * i + 1] = n + i;
        }
        tv_op = std::make_shared<ComposedMap>(std::make_shared<PermutationMap>(std::move(perm)),
                                              diff);
        tv_atom = std::make_shared<GroupL2>(2 * n, lambda_tv);
    } else {
        tv_atom = std::make_shared<L1Norm>(2 * n, lambda_tv);
    }
    p.blocks.push_back({tv_op, tv_atom});

    p.G = std::make_shared<L1Shifted>(image, 1.0);
    p.consensus = false;

    auto fidelity = p.G;
    auto tv_map = p.blocks[1].K;
    auto tv_fn = tv_atom;
    p.objective_fn = [fidelity, box, tv_map, tv_fn](const DenseVector& x) {
        const double ind = box->eval(x);
        if (std::isinf(ind))
            return ind;
        return fidelity->eval(x) + tv_fn->eval(tv_map->apply(x));
    };
    p.check();
    return p;
}

CompositeProblem build_logreg(const LogRegDataset& data, double tau, std::size_t batches)
{
    data.check();
    if (!(tau > 0.0))
        throw std::invalid_argument("build_logreg: tau must be positive");
    const std::size_t m = data.m();
    if (batches == 0 || batches > m)
        throw std::invalid_argument("build_logreg: batch count must lie in [1, m]");

    CompositeProblem p;
    p.primal_dim = data.q;
    p.consensus = true;

    // contiguous, equal-size-as-possible partition in input order
    const std::size_t base = m / batches;
    const std::size_t extra = m % batches;
    std::size_t row = 0;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t len = base + (b < extra ? 1 : 0);
        std::vector<double> block_data;
        block_data.reserve(len * data.q);
        std::vector<double> block_labels;
        for (std::size_t r = row; r < row + len; ++r) {
            block_data.insert(block_data.end(), data.features[r].begin(), data.features[r].end());
            block_labels.push_back(data.labels[r]);
        }
        row += len;
        p.blocks.push_back(
            {std::make_shared<DenseMatrixMap>(len, data.q, std::move(block_data)),
             std::make_shared<LogisticLoss>(std::move(block_labels), 1.0 / static_cast<double>(m))});
    }

    p.G = std::make_shared<L1Norm>(data.q, tau / static_cast<double>(batches));

    const auto features = data.features;
    const auto labels = data.labels;
    p.objective_fn = [features, labels, tau, m](const DenseVector& x) {
        double loss = 0.0;
        for (std::size_t i = 0; i < features.size(); ++i)
            loss += stable_logistic_term(labels[i] * dot(features[i], x));
        double l1 = 0.0;
        for (double xi : x)
            l1 += std::abs(xi);
        return loss / static_cast<double>(m) + tau * l1;
    };
    p.check();
    return p;
}

}  // namespace pdfp
