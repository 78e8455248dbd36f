#include "pdfp/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace pdfp {

namespace {

DenseVector extrapolate(const DenseVector& cur, const DenseVector& prev, double alpha)
{
    DenseVector r(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i)
        r[i] = cur[i] + alpha * (cur[i] - prev[i]);
    return r;
}

DenseVector relax(const DenseVector& proposed, const DenseVector& cur, double rho)
{
    DenseVector r(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i)
        r[i] = rho * proposed[i] + (1.0 - rho) * cur[i];
    return r;
}

void require_validated(const StepMetric& metric)
{
    if (!metric.validated())
        throw std::invalid_argument("solver: step metric has not been validated");
}

}  // namespace

DenseVector IterTriple::v_flat() const
{
    DenseVector flat;
    for (const auto& b : v)
        flat.insert(flat.end(), b.begin(), b.end());
    return flat;
}

double delta_hat_lower_bound(double alpha, double theta)
{
    return (alpha * alpha * (1.0 + alpha) + alpha * theta) / (1.0 - alpha * alpha);
}

double rho_upper_bound(double alpha, double theta, double delta_hat)
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("rho_upper_bound: alpha must lie in [0, 1)");
    if (!(theta > 0.0))
        throw std::invalid_argument("rho_upper_bound: theta must be positive");
    const double lb = delta_hat_lower_bound(alpha, theta);
    if (!(delta_hat > lb))
        throw std::invalid_argument("rho_upper_bound: delta_hat must exceed " + std::to_string(lb));
    const double bracket = alpha * (1.0 + alpha) + alpha * delta_hat + theta;
    return (delta_hat - alpha * bracket) / (delta_hat * (1.0 + bracket));
}

void InertialSchedule::check() const
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("InertialSchedule: alpha must lie in [0, 1)");
    if (!(theta > 0.0) || !(delta_hat > 0.0))
        throw std::invalid_argument("InertialSchedule: theta and delta_hat must be positive");
    const double bound = rho_upper_bound(alpha, theta, delta_hat);  // validates delta_hat too
    if (!(rho > 0.0 && rho < bound))
        throw std::invalid_argument("InertialSchedule: rho must lie in (0, " +
                                    std::to_string(bound) + "), got " + std::to_string(rho));
}

InertialSchedule suggest_schedule(double alpha, double theta)
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("suggest_schedule: alpha must lie in [0, 1)");
    InertialSchedule s;
    s.alpha = alpha;
    s.theta = theta;
    s.delta_hat = std::max(2.0 * delta_hat_lower_bound(alpha, theta), 1e-6);
    s.rho = 0.99 * rho_upper_bound(alpha, theta, s.delta_hat);
    s.check();
    return s;
}

StepOutput ipdfp_step(const IterTriple& z, const IterTriple& z_prev, const LinearMap& K,
                      const ProxFunction& prox_h, const ProxFunction& prox_gstar,
                      const ProxFunction& prox_fstar, const StepMetric& metric, double alpha_k,
                      double rho_k, DualRule rule)
{
    require_validated(metric);
    if (z.v.size() != 1 || z_prev.v.size() != 1)
        throw std::invalid_argument("ipdfp_step: expected a single dual block");
    const std::size_t n = z.x.size();
    if (z.y.size() != n || K.in_dim() != n || z.v[0].size() != K.out_dim())
        throw std::invalid_argument("ipdfp_step: state dims do not match the operator");
    metric.sigma().require_dim(n, "ipdfp_step sigma");
    metric.tau().require_dim(K.out_dim(), "ipdfp_step tau");

    const StepSize& sigma = metric.sigma();
    const StepSize& gamma = metric.gamma();
    const StepSize& tau = metric.tau();

    const DenseVector xi = extrapolate(z.x, z_prev.x, alpha_k);
    const DenseVector eta = extrapolate(z.y, z_prev.y, alpha_k);
    const DenseVector nu = extrapolate(z.v[0], z_prev.v[0], alpha_k);

    const DenseVector kn = K.adjoint_apply(nu);
    DenseVector arg_x(n);
    for (std::size_t j = 0; j < n; ++j)
        arg_x[j] = xi[j] - sigma.at(j) * eta[j] - sigma.at(j) * kn[j];
    DenseVector x_tilde = prox_h.prox(sigma, arg_x);

    DenseVector arg_y(n);
    for (std::size_t j = 0; j < n; ++j)
        arg_y[j] = eta[j] + gamma.at(j) * xi[j];
    DenseVector y_tilde = prox_gstar.prox(gamma, arg_y);

    const DenseVector& w = (rule == DualRule::condat) ? xi : eta;
    DenseVector probe(n);
    for (std::size_t j = 0; j < n; ++j)
        probe[j] = 2.0 * x_tilde[j] - w[j];
    const DenseVector kp = K.apply(probe);
    DenseVector arg_v(kp.size());
    for (std::size_t i = 0; i < kp.size(); ++i)
        arg_v[i] = nu[i] + tau.at(i) * kp[i];
    DenseVector v_tilde = prox_fstar.prox(tau, arg_v);

    StepOutput out;
    out.proposed = IterTriple{x_tilde, y_tilde, {v_tilde}};
    out.next = IterTriple{relax(x_tilde, z.x, rho_k), relax(y_tilde, z.y, rho_k),
                          {relax(v_tilde, z.v[0], rho_k)}};
    return out;
}

StepOutput sipdfp_step(const IterTriple& z, const IterTriple& z_prev,
                       const std::vector<std::shared_ptr<const LinearMap>>& Ks,
                       const ProxFunction& prox_gstar,
                       const std::vector<std::shared_ptr<const ProxFunction>>& prox_fstars,
                       const StepMetric& metric, double alpha_k, double rho_k, DualRule rule)
{
    require_validated(metric);
    const std::size_t m = Ks.size();
    if (m == 0 || prox_fstars.size() != m)
        throw std::invalid_argument("sipdfp_step: block count mismatch (" + std::to_string(m) +
                                    " operators, " + std::to_string(prox_fstars.size()) +
                                    " prox objects)");
    if (z.v.size() != m || z_prev.v.size() != m)
        throw std::invalid_argument("sipdfp_step: dual state must carry " + std::to_string(m) +
                                    " blocks, got " + std::to_string(z.v.size()));
    const std::size_t n = z.x.size();
    for (std::size_t i = 0; i < m; ++i)
        if (Ks[i]->in_dim() != n || z.v[i].size() != Ks[i]->out_dim())
            throw std::invalid_argument("sipdfp_step: block " + std::to_string(i) +
                                        " dims do not match the state");

    const StepSize& sigma = metric.sigma();
    const StepSize& gamma = metric.gamma();
    const StepSize& tau = metric.tau();
    metric.sigma().require_dim(n, "sipdfp_step sigma");

    const DenseVector xi = extrapolate(z.x, z_prev.x, alpha_k);
    const DenseVector eta = extrapolate(z.y, z_prev.y, alpha_k);
    std::vector<DenseVector> nu(m);
    for (std::size_t i = 0; i < m; ++i)
        nu[i] = extrapolate(z.v[i], z_prev.v[i], alpha_k);

    // consensus-projected primal update: the prox of the consensus
    // indicator collapses to the shared average
    DenseVector ksum(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        DenseVector a = Ks[i]->adjoint_apply(nu[i]);
        for (std::size_t j = 0; j < n; ++j)
            ksum[j] += a[j];
    }
    DenseVector x_tilde(n);
    for (std::size_t j = 0; j < n; ++j)
        x_tilde[j] = xi[j] - sigma.at(j) * eta[j] -
                     sigma.at(j) / static_cast<double>(m) * ksum[j];

    DenseVector arg_y(n);
    for (std::size_t j = 0; j < n; ++j)
        arg_y[j] = eta[j] + gamma.at(j) * xi[j];
    DenseVector y_tilde = prox_gstar.prox(gamma, arg_y);

    const DenseVector& w = (rule == DualRule::condat) ? xi : eta;
    DenseVector probe(n);
    for (std::size_t j = 0; j < n; ++j)
        probe[j] = 2.0 * x_tilde[j] - w[j];

    // the m dual-block updates read only xi-derived quantities and their
    // own nu_i; order does not matter
    std::vector<DenseVector> v_tilde(m);
    std::size_t off = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t len = Ks[i]->out_dim();
        const StepSize tau_i = tau.slice(off, len);
        const DenseVector kp = Ks[i]->apply(probe);
        DenseVector arg_v(len);
        for (std::size_t r = 0; r < len; ++r)
            arg_v[r] = nu[i][r] + tau_i.at(r) * kp[r];
        v_tilde[i] = prox_fstars[i]->prox(tau_i, arg_v);
        off += len;
    }
    if (!tau.is_scalar() && tau.size() != off)
        throw std::invalid_argument("sipdfp_step: tau diagonal length does not match dual dim");

    StepOutput out;
    out.proposed = IterTriple{x_tilde, y_tilde, v_tilde};
    out.next.x = relax(x_tilde, z.x, rho_k);
    out.next.y = relax(y_tilde, z.y, rho_k);
    out.next.v.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        out.next.v[i] = relax(v_tilde[i], z.v[i], rho_k);
    return out;
}

SolveResult run(const CompositeProblem& problem, const StepMetric& metric,
                const InertialSchedule& schedule, const SolveOptions& options)
{
    problem.check();
    schedule.check();
    require_validated(metric);
    if (options.max_iter < 1 || options.record_every < 1)
        throw std::invalid_argument("run: max_iter and record_every must be >= 1");

    const std::size_t n = problem.primal_dim;

    std::vector<std::shared_ptr<const LinearMap>> Ks;
    std::vector<std::shared_ptr<const ProxFunction>> fstars;
    for (const auto& b : problem.blocks) {
        Ks.push_back(b.K);
        fstars.push_back(std::make_shared<ConjugateProx>(b.F));
    }
    const StackedMap monitorK(Ks);

    std::shared_ptr<const ProxFunction> g =
        problem.G ? problem.G : std::make_shared<ZeroFunction>(n);
    const ConjugateProx prox_gstar(g);

    // non-consensus path folds the blocks into one stacked composition
    std::shared_ptr<const LinearMap> stackedK;
    std::shared_ptr<const ProxFunction> stacked_fstar;
    std::shared_ptr<const ProxFunction> prox_h;
    if (!problem.consensus) {
        stackedK = std::make_shared<StackedMap>(Ks);
        std::vector<std::shared_ptr<const ProxFunction>> parts;
        for (const auto& b : problem.blocks)
            parts.push_back(b.F);
        stacked_fstar = std::make_shared<ConjugateProx>(std::make_shared<BlockSeparable>(parts));
        prox_h = problem.H ? problem.H : std::make_shared<ZeroFunction>(n);
    }

    IterTriple z;
    z.x = options.x0.empty() ? zeros(n) : options.x0;
    if (z.x.size() != n)
        throw std::invalid_argument("run: x0 length does not match the primal dim");
    z.y = zeros(n);
    if (problem.consensus) {
        for (const auto& b : problem.blocks)
            z.v.push_back(zeros(b.K->out_dim()));
    } else {
        z.v.push_back(zeros(monitorK.out_dim()));
    }
    IterTriple z_prev = z;

    const auto as_metric_triple = [&](const IterTriple& t) {
        return MetricTriple{t.x, t.y, t.v.size() == 1 ? t.v[0] : t.v_flat()};
    };
    const double denom = 1.0 + metric_norm(metric, monitorK, as_metric_triple(z));

    SolveResult result;
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed_ms = [&]() {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };
    const auto record = [&](std::size_t k, double res, double pchange) {
        result.trace.push_back(
            {k, problem.objective(z.x), res, pchange, elapsed_ms()});
    };

    double initial_residual = -1.0;
    std::string termination = "max_iter";
    std::size_t k = 0;
    for (k = 1; k <= options.max_iter; ++k) {
        const double alpha_k = schedule.alpha_at(k);
        StepOutput step;
        if (problem.consensus) {
            step = sipdfp_step(z, z_prev, Ks, prox_gstar, fstars, metric, alpha_k, schedule.rho,
                               options.rule);
        } else {
            IterTriple zc = z, zp = z_prev;
            // single stacked dual block for the plain iteration
            if (zc.v.size() != 1) {
                zc.v = {z.v_flat()};
                zp.v = {z_prev.v_flat()};
            }
            step = ipdfp_step(zc, zp, *stackedK, *prox_h, prox_gstar, *stacked_fstar, metric,
                              alpha_k, schedule.rho, options.rule);
        }

        IterTriple diff;
        diff.x = step.next.x - z.x;
        diff.y = step.next.y - z.y;
        diff.v.resize(step.next.v.size());
        for (std::size_t i = 0; i < diff.v.size(); ++i)
            diff.v[i] = step.next.v[i] - z.v[i];
        const double residual = metric_norm(metric, monitorK, as_metric_triple(diff));
        const double pchange = norm2(diff.x);

        z_prev = z;
        z = step.next;

        if (initial_residual < 0.0)
            initial_residual = residual;
        if (initial_residual > 0.0 && residual > 1e6 * initial_residual) {
            record(k, residual, pchange);
            termination = "diverged";
            break;
        }
        if (residual / denom <= options.tol) {
            record(k, residual, pchange);
            termination = "converged";
            break;
        }
        if (k % options.record_every == 0)
            record(k, residual, pchange);
        if (k == options.max_iter) {
            if (k % options.record_every != 0)
                record(k, residual, pchange);
            termination = "max_iter";
        }
    }

    result.x = z.x;
    result.termination = termination;
    result.iterations = std::min(k, options.max_iter);
    result.state = z;
    return result;
}

}  // namespace pdfp
