#pragma once

#include "pdfp/linop.hpp"
#include "pdfp/prox.hpp"
#include "pdfp/vec.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace pdfp {

struct ProxBlock {
    std::shared_ptr<const LinearMap> K;
    std::shared_ptr<const ProxFunction> F;
};

/// A solver-ready bundle for min sum_i F_i(K_i x) + G(x) (+ H(x)).
/// When `consensus` is set the problem is solved in its splitting form over
/// the block consensus set and G is the per-block function of that form.
class CompositeProblem {
public:
    std::size_t primal_dim = 0;
    std::vector<ProxBlock> blocks;
    std::shared_ptr<const ProxFunction> G;
    std::shared_ptr<const ProxFunction> H;  // null means H = 0
    bool consensus = false;
    std::function<double(const DenseVector&)> objective_fn;

    double objective(const DenseVector& x) const;

    void check() const;
};

struct LogRegDataset {
    std::vector<DenseVector> features;  // m rows of length q
    std::vector<double> labels;         // entries in {-1, +1}
    std::size_t q = 0;

    std::size_t m() const { return features.size(); }
    void check() const;
};

/// L1/TV denoising of a row-major h x w image b:
/// min ||x - b||_1 + delta_box(x) + lambda_tv * TV(x), with the pixel box
/// [box_lo, box_hi] and anisotropic (l1) or isotropic (pairwise l2) TV.
CompositeProblem build_l1tv(const DenseVector& image, std::size_t height, std::size_t width,
                            double lambda_tv, bool isotropic, double box_lo = 0.0,
                            double box_hi = 255.0);

/// l1-regularized logistic regression
/// min (1/m) sum_i log(1 + exp(-y_i a_i.x)) + tau ||x||_1,
/// split into `batches` contiguous near-equal blocks for the consensus
/// solver. The bundle's G is the per-block (tau/batches)||.||_1; the
/// objective evaluates the unsplit form directly.
CompositeProblem build_logreg(const LogRegDataset& data, double tau, std::size_t batches);

}  // namespace pdfp
