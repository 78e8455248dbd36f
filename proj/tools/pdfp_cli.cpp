// Command-line harness for the inertial primal-dual solvers: L1/TV image
// denoising, l1-regularized logistic regression, and step-parameter
// validation. Experiments emit a convergence trace CSV and a key=value
// summary; all runs are deterministic.

#include "pdfp/io.hpp"
#include "pdfp/linop.hpp"
#include "pdfp/oracle.hpp"
#include "pdfp/precond.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/solver.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIoError = 1;
constexpr int kExitValidationError = 2;

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    double alpha = 0.0;
    double theta = 0.01;
    double rho = -1.0;  // <0 = from suggest_schedule
    std::string rule = "as_written";
    std::string metric_mode = "scalar";
    double s_exponent = 1.0;
    std::size_t max_iter = 10000;
    double tol = 1e-10;
    std::size_t record_every = 100;
    double sigma = -1.0, gamma = -1.0, tau = -1.0;  // <0 = auto-fill
};

/// Applies a flat key=value config file to a parsed subcommand. Only options
/// absent from the command line are filled in, so explicit flags win.
void apply_config(CLI::App* cmd, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(path + ": cannot open config file");
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (op == nullptr || op->get_name() == "--config")
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown config key '" + key + "'");
        if (op->count() == 0) {
            op->add_result(val);
            op->run_callback();
        }
    }
}

void add_common(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--config", o.config_path,
                    "flat key=value config file; command line overrides");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--alpha", o.alpha, "inertia cap in [0,1)");
    cmd->add_option("--theta", o.theta, "schedule parameter theta");
    cmd->add_option("--rho", o.rho, "constant relaxation (default: from the schedule bound)");
    cmd->add_option("--rule", o.rule, "dual update rule")
        ->check(CLI::IsMember({"as_written", "condat"}));
    cmd->add_option("--metric", o.metric_mode, "step metric mode")
        ->check(CLI::IsMember({"scalar", "diagonal"}));
    cmd->add_option("--s", o.s_exponent, "diagonal preconditioner exponent in [0,2]");
    cmd->add_option("--max-iter", o.max_iter, "iteration budget");
    cmd->add_option("--tol", o.tol, "relative KM residual stopping tolerance");
    cmd->add_option("--record-every", o.record_every, "trace recording stride");
    cmd->add_option("--sigma", o.sigma, "primal step sigma (scalar metric)");
    cmd->add_option("--gamma", o.gamma, "G-dual step gamma (scalar metric)");
    cmd->add_option("--tau", o.tau, "F-dual step tau (scalar metric)");
}

pdfp::DualRule parse_rule(const std::string& r)
{
    return r == "condat" ? pdfp::DualRule::condat : pdfp::DualRule::as_written;
}

std::vector<double> block_norms(const pdfp::CompositeProblem& p)
{
    std::vector<double> norms;
    for (const auto& b : p.blocks)
        norms.push_back(pdfp::estimate_norm(*b.K).value * pdfp::kNormSafety);
    return norms;
}

/// Resolves the step metric: explicit scalars, the 0.95 auto-fill, or the
/// diagonal construction; throws ValidationFailure when the gate rejects.
pdfp::StepMetric resolve_metric(const pdfp::CompositeProblem& problem, const CommonOpts& o,
                                std::vector<std::pair<std::string, std::string>>& summary)
{
    if (o.metric_mode == "diagonal") {
        std::vector<std::shared_ptr<const pdfp::LinearMap>> Ks;
        for (const auto& b : problem.blocks)
            Ks.push_back(b.K);
        const pdfp::StackedMap stacked(Ks);
        pdfp::StepMetric metric = pdfp::build_diagonal(stacked, o.s_exponent);
        const auto rep = pdfp::validate_diagonal(metric, stacked);
        if (!rep.accepted)
            throw ValidationFailure("diagonal metric rejected: " + rep.message);
        summary.emplace_back("metric_mode", "diagonal");
        summary.emplace_back("s_exponent", pdfp::io::format_g12(o.s_exponent));
        summary.emplace_back("metric_combined_norm_sq", pdfp::io::format_g12(rep.combined));
        return rep.metric;
    }

    const auto norms = block_norms(problem);
    double sum_sq = 0.0;
    for (double n : norms)
        sum_sq += n * n;

    double sigma = o.sigma, gamma = o.gamma, tau = o.tau;
    if (sigma < 0.0 || gamma < 0.0 || tau < 0.0) {
        // largest symmetric step with validation margin 0.05:
        // s^2 (1 + sum||K_i||^2) = 0.95
        const double s = std::sqrt(0.95 / (1.0 + sum_sq));
        if (sigma < 0.0)
            sigma = s;
        if (gamma < 0.0)
            gamma = s;
        if (tau < 0.0)
            tau = s;
    }
    const auto rep = pdfp::validate_split(sigma, gamma, tau, norms);
    if (!rep.accepted)
        throw ValidationFailure("scalar steps rejected: " + rep.message +
                                " (symmetric feasible bound s < " +
                                pdfp::io::format_g12(std::sqrt(1.0 / (1.0 + sum_sq))) + ")");
    summary.emplace_back("metric_mode", "scalar");
    summary.emplace_back("sigma", pdfp::io::format_g12(sigma));
    summary.emplace_back("gamma", pdfp::io::format_g12(gamma));
    summary.emplace_back("tau", pdfp::io::format_g12(tau));
    summary.emplace_back("validation_margin", pdfp::io::format_g12(rep.margin));
    return rep.metric;
}

int run_experiment(const pdfp::CompositeProblem& problem, const CommonOpts& o,
                   const std::string& task, const pdfp::DenseVector& x0,
                   std::vector<std::pair<std::string, std::string>> summary,
                   const std::function<void(const pdfp::DenseVector&)>& emit_extra,
                   const std::function<double(const pdfp::DenseVector&)>& final_objective)
{
    namespace fs = std::filesystem;
    fs::create_directories(o.out_dir);

    const pdfp::StepMetric metric = resolve_metric(problem, o, summary);

    pdfp::InertialSchedule schedule = pdfp::suggest_schedule(o.alpha, o.theta);
    if (o.rho >= 0.0) {
        schedule.rho = o.rho;
        schedule.check();  // rejects an inadmissible override
    }

    pdfp::SolveOptions opts;
    opts.max_iter = o.max_iter;
    opts.tol = o.tol;
    opts.rule = parse_rule(o.rule);
    opts.record_every = o.record_every;
    opts.x0 = x0;

    const pdfp::SolveResult result = pdfp::run(problem, metric, schedule, opts);

    summary.emplace_back("task", task);
    summary.emplace_back("algorithm", problem.consensus ? "sipdfp" : "ipdfp");
    summary.emplace_back("alpha", pdfp::io::format_g12(schedule.alpha));
    summary.emplace_back("theta", pdfp::io::format_g12(schedule.theta));
    summary.emplace_back("delta_hat", pdfp::io::format_g12(schedule.delta_hat));
    summary.emplace_back("rho", pdfp::io::format_g12(schedule.rho));
    summary.emplace_back("rule", o.rule);
    summary.emplace_back("max_iter", std::to_string(o.max_iter));
    summary.emplace_back("tol", pdfp::io::format_g12(o.tol));
    summary.emplace_back("iterations", std::to_string(result.iterations));
    summary.emplace_back("termination", result.termination);
    summary.emplace_back("final_objective", pdfp::io::format_g12(final_objective(result.x)));
    if (!result.trace.empty()) {
        summary.emplace_back("final_km_residual",
                             pdfp::io::format_g12(result.trace.back().km_residual_P));
        summary.emplace_back("elapsed_ms", pdfp::io::format_g12(result.trace.back().elapsed_ms));
    }

    pdfp::io::write_trace_csv((fs::path(o.out_dir) / "trace.csv").string(), result.trace);
    pdfp::io::write_summary((fs::path(o.out_dir) / "summary.txt").string(), summary);
    if (emit_extra)
        emit_extra(result.x);

    std::cout << task << ": " << result.termination << " after " << result.iterations
              << " iterations, objective " << pdfp::io::format_g12(final_objective(result.x))
              << "\n";
    return result.termination == "diverged" ? kExitValidationError : kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"inertial primal-dual fixed-point solvers"};
    app.require_subcommand(1);

    // denoise
    CommonOpts den;
    std::string image_path;
    double lambda_tv = 10.0;
    bool isotropic = false;
    auto* denoise = app.add_subcommand("denoise", "L1/TV image denoising");
    add_common(denoise, den);
    denoise->add_option("--image", image_path, "input PGM (P2 or P5)");
    denoise->add_option("--lambda-tv", lambda_tv, "TV regularization weight");
    denoise->add_flag("--isotropic", isotropic, "isotropic TV (default anisotropic)");

    // logreg
    CommonOpts lr;
    std::string data_path;
    double reg = 0.01;
    std::size_t batches = 1;
    auto* logreg = app.add_subcommand("logreg", "l1-regularized logistic regression");
    add_common(logreg, lr);
    logreg->add_option("--data", data_path, "LibSVM-format dataset");
    logreg->add_option("--reg", reg, "l1 regularization weight");
    logreg->add_option("--batches", batches, "consensus batch count");

    // validate
    const double unset = std::numeric_limits<double>::quiet_NaN();
    double vs = unset, vg = unset, vt = unset;
    std::vector<double> vnorms{1.0};
    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "check a scalar step triple");
    validate->add_option("--config", validate_config,
                         "flat key=value config file; command line overrides");
    validate->add_option("--sigma", vs, "sigma");
    validate->add_option("--gamma", vg, "gamma");
    validate->add_option("--tau", vt, "tau");
    validate->add_option("--normk", vnorms, "operator norm(s), one per block");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto require = [](bool present, const char* what) {
            if (!present)
                throw std::invalid_argument(std::string(what) +
                                            " is required (command line or config)");
        };
        if (denoise->parsed() && !den.config_path.empty())
            apply_config(denoise, den.config_path);
        if (logreg->parsed() && !lr.config_path.empty())
            apply_config(logreg, lr.config_path);
        if (validate->parsed() && !validate_config.empty())
            apply_config(validate, validate_config);
        if (denoise->parsed()) {
            require(!image_path.empty(), "--image");
            require(!den.out_dir.empty(), "--out");
            const pdfp::io::PgmImage img = pdfp::io::load_pgm(image_path);
            const auto problem =
                pdfp::build_l1tv(img.pixels, img.height, img.width, lambda_tv, isotropic, 0.0,
                                 static_cast<double>(img.maxval));
            std::vector<std::pair<std::string, std::string>> summary;
            summary.emplace_back("image", image_path);
            summary.emplace_back("height", std::to_string(img.height));
            summary.emplace_back("width", std::to_string(img.width));
            summary.emplace_back("lambda_tv", pdfp::io::format_g12(lambda_tv));
            summary.emplace_back("tv", isotropic ? "isotropic" : "anisotropic");

            const auto clamp_pixels = [&](const pdfp::DenseVector& x) {
                pdfp::DenseVector c(x.size());
                for (std::size_t i = 0; i < x.size(); ++i)
                    c[i] = std::clamp(x[i], 0.0, static_cast<double>(img.maxval));
                return c;
            };
            const auto emit = [&](const pdfp::DenseVector& x) {
                pdfp::io::PgmImage out_img{x, img.height, img.width, img.maxval};
                pdfp::io::save_pgm(
                    (std::filesystem::path(den.out_dir) / "denoised.pgm").string(), out_img);
            };
            const auto final_obj = [&](const pdfp::DenseVector& x) {
                return problem.objective(clamp_pixels(x));
            };
            return run_experiment(problem, den, "denoise", img.pixels, std::move(summary), emit,
                                  final_obj);
        }

        if (logreg->parsed()) {
            require(!data_path.empty(), "--data");
            require(!lr.out_dir.empty(), "--out");
            const pdfp::LogRegDataset data = pdfp::io::load_libsvm(data_path);
            const auto problem = pdfp::build_logreg(data, reg, batches);
            std::vector<std::pair<std::string, std::string>> summary;
            summary.emplace_back("data", data_path);
            summary.emplace_back("samples", std::to_string(data.m()));
            summary.emplace_back("features", std::to_string(data.q));
            summary.emplace_back("reg", pdfp::io::format_g12(reg));
            summary.emplace_back("batches", std::to_string(batches));
            return run_experiment(problem, lr, "logreg", pdfp::zeros(data.q), std::move(summary),
                                  nullptr,
                                  [&](const pdfp::DenseVector& x) { return problem.objective(x); });
        }

        // validate
        require(!std::isnan(vs), "--sigma");
        require(!std::isnan(vg), "--gamma");
        require(!std::isnan(vt), "--tau");
        const auto rep = pdfp::validate_split(vs, vg, vt, vnorms);
        double sum_sq = 0.0;
        for (double n : vnorms)
            sum_sq += n * n;
        std::cout << (rep.accepted ? "accepted" : "rejected") << "\n"
                  << "lhs=" << pdfp::io::format_g12(rep.lhs) << "\n"
                  << "margin=" << pdfp::io::format_g12(rep.margin) << "\n"
                  << "symmetric_feasible_bound="
                  << pdfp::io::format_g12(std::sqrt(1.0 / (1.0 + sum_sq))) << "\n";
        return rep.accepted ? kExitOk : kExitValidationError;
    } catch (const ValidationFailure& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidationError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidationError;
    } catch (const CLI::Error& e) {
        // bad value in a config file surfaces through the option callback
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}
