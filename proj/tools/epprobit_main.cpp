// Command-line entry point: fit a probit model by expectation propagation,
// evaluate predictive probabilities, run the synthetic accuracy study, or
// cross-check the closed forms against the built-in oracles.
//
// Exit codes: 0 success, 1 oracle-check failure, 2 input/validation error,
// 3 fit did not converge (artifact still written), 4 fit made no progress.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "epprobit/ep.hpp"
#include "epprobit/io.hpp"
#include "epprobit/oracles.hpp"
#include "epprobit/predictive.hpp"
#include "epprobit/rng.hpp"
#include "epprobit/simstudy.hpp"

namespace {

using namespace epprobit;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitNonProgress = 4;

int fail(const char* category, const std::string& message, int code) {
    std::cerr << "epprobit: " << category << ": " << message << "\n";
    return code;
}

struct FitOptions {
    std::string input;
    std::string model;
    std::string text_dump;
    std::string engine = "auto";
    double prior_variance = 25.0;
    EpConfig ep;
};

Engine parse_engine(const std::string& name) {
    if (name == "dense") return Engine::Dense;
    if (name == "lowrank") return Engine::LowRank;
    return Engine::Auto;
}

int cmd_fit(const FitOptions& opt) {
    const Dataset data = read_dataset_csv(opt.input, opt.prior_variance);
    const FitResult result = fit(data, opt.ep, parse_engine(opt.engine));

    ModelArtifact artifact{result.posterior, result.sites, result.diagnostics,
                           data.prior_variance};
    write_model(artifact, opt.model);
    if (!opt.text_dump.empty()) {
        write_model_text(artifact, opt.text_dump);
    }
    if (!result.diagnostics.converged) {
        return fail("nonconvergence",
                    "max delta " + std::to_string(result.diagnostics.max_delta_trace.back()) +
                        " after " + std::to_string(result.diagnostics.sweeps_run) +
                        " sweeps; artifact written to " + opt.model,
                    kExitNotConverged);
    }
    return kExitOk;
}

struct PredictOptions {
    std::string model;
    std::string test;
    std::string output;
};

int cmd_predict(const PredictOptions& opt) {
    const ModelArtifact artifact = read_model(opt.model);
    const Eigen::MatrixXd x_new = read_covariates_csv(opt.test);
    if (x_new.cols() != artifact.posterior.dim()) {
        return fail("validate",
                    "test covariates have " + std::to_string(x_new.cols()) +
                        " columns, model expects " + std::to_string(artifact.posterior.dim()),
                    kExitInput);
    }
    write_probabilities(predict_batch(artifact.posterior, x_new), opt.output);
    return kExitOk;
}

struct SimstudyOptions {
    std::string output;
    std::uint64_t seed = 1;
    int draws = 10000;
    int burn_in = 2000;
    double prior_variance = 25.0;
    EpConfig ep;
    int jobs = 0;
    bool quick = false;
};

int cmd_simstudy(const SimstudyOptions& opt) {
    std::vector<ScenarioSpec> specs;
    for (Scenario s : all_scenarios()) {
        ScenarioSpec spec;
        spec.scenario_id = s;
        spec.seed = opt.seed;
        spec.prior_variance = opt.prior_variance;
        spec.baseline.draws = opt.draws;
        spec.baseline.burn_in = opt.burn_in;
        spec.ep = opt.ep;
        if (opt.quick) {
            spec.p_grid = {50};
            spec.baseline.draws = std::min(opt.draws, 2000);
            spec.baseline.burn_in = std::min(opt.burn_in, 500);
        }
        specs.push_back(spec);
        if (opt.quick) break;  // single scenario, single grid point
    }
    int jobs = opt.jobs;
    if (jobs <= 0) {
        jobs = static_cast<int>(std::thread::hardware_concurrency());
        if (jobs <= 0) jobs = 1;
    }
    const StudyReport report = run_study(specs, jobs);
    write_report_csv(report, opt.output);
    return kExitOk;
}

struct OracleCheckOptions {
    std::uint64_t seed = 1;
    int draws = 10000;
    int burn_in = 2000;
    double tol = 1e-8;
};

struct OracleFixture {
    std::string name;
    Dataset data;
    Eigen::MatrixXd x_new;  // one test unit per row
    QuadratureSpec quad;
};

std::vector<OracleFixture> builtin_fixtures() {
    std::vector<OracleFixture> fixtures;

    {
        Eigen::MatrixXd X(1, 1);
        X << 1.0;
        Eigen::VectorXi y(1);
        y << 1;
        Eigen::MatrixXd t(1, 1);
        t << 1.0;
        fixtures.push_back({"p1-single", Dataset(X, y, 1.0), t, QuadratureSpec{10.0, 2001}});
    }
    {
        Eigen::MatrixXd X(6, 1);
        X << 0.5, -1.2, 2.0, 0.3, -0.7, 1.5;
        Eigen::VectorXi y(6);
        y << 1, 0, 1, 1, 0, 1;
        Eigen::MatrixXd t(2, 1);
        t << 0.8, -1.5;
        fixtures.push_back({"p1-mixed", Dataset(X, y, 4.0), t, QuadratureSpec{10.0, 2001}});
    }
    {
        Eigen::MatrixXd X(10, 2);
        X << 0.4, -1.1, 1.3, 0.2, -0.6, 0.9, 2.1, -0.3, 0.7, 1.4,
            -1.8, 0.5, 0.1, -0.9, 1.0, 1.1, -0.2, -1.6, 0.8, 0.3;
        Eigen::VectorXi y(10);
        y << 1, 1, 0, 1, 1, 0, 0, 1, 0, 1;
        Eigen::MatrixXd t(2, 2);
        t << 0.5, -1.0, 1.2, 0.4;
        fixtures.push_back({"p2-small", Dataset(X, y, 9.0), t, QuadratureSpec{10.0, 801}});
    }
    {
        // Seeded wider p=2 fixture; mt19937_64 makes it reproducible.
        Rng rng(424242);
        Eigen::MatrixXd X(20, 2);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = rng.normal();
        }
        Eigen::VectorXd beta(2);
        beta << 0.8, -0.5;
        Eigen::VectorXi y(20);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            y[i] = rng.uniform01() < norm_cdf(X.row(i).dot(beta)) ? 1 : 0;
        }
        Eigen::MatrixXd t(2, 2);
        t << 1.0, 0.0, -0.7, 1.3;
        fixtures.push_back({"p2-wide", Dataset(X, y, 25.0), t, QuadratureSpec{10.0, 801}});
    }
    return fixtures;
}

int cmd_oracle_check(const OracleCheckOptions& opt) {
    constexpr double kEpVsQuadLimit = 0.02;
    constexpr double kQuadDoublingLimit = 1e-8;

    bool all_pass = true;
    const auto report = [&all_pass](const std::string& fixture, const std::string& check,
                                    double delta, double limit) {
        const bool pass = delta <= limit;
        all_pass = all_pass && pass;
        std::printf("[%s] %-10s %-22s delta=%.3e limit=%.3e\n", pass ? "PASS" : "FAIL",
                    fixture.c_str(), check.c_str(), delta, limit);
    };

    EpConfig cfg;
    cfg.tol = opt.tol;

    const auto fixtures = builtin_fixtures();
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
        const OracleFixture& fx = fixtures[f];
        const FitResult fitted = fit(fx.data, cfg, Engine::Auto);
        GibbsSpec gibbs{opt.burn_in, opt.draws, mix_seed(opt.seed, f)};
        const GibbsResult base = gibbs_predictive(fx.data, fx.x_new, gibbs);

        for (Eigen::Index r = 0; r < fx.x_new.rows(); ++r) {
            const Eigen::VectorXd x = fx.x_new.row(r).transpose();
            const std::string unit = fx.name + "#" + std::to_string(r);

            const double quad = exact_predictive_quadrature(fx.data, x, fx.quad);
            QuadratureSpec doubled = fx.quad;
            doubled.nodes_per_dim = 2 * fx.quad.nodes_per_dim - 1;
            const double quad2 = exact_predictive_quadrature(fx.data, x, doubled);
            report(unit, "quadrature-doubling", std::abs(quad - quad2), kQuadDoublingLimit);

            const double ep = predict_one(fitted.posterior, x).probability;
            report(unit, "ep-vs-quadrature", std::abs(ep - quad), kEpVsQuadLimit);

            const double se = base.standard_errors[r];
            report(unit, "gibbs-vs-quadrature", std::abs(base.probabilities[r] - quad),
                   3.0 * se);
        }
    }
    if (!all_pass) {
        return fail("check", "oracle cross-checks failed (see FAIL lines above)",
                    kExitCheckFailed);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expectation propagation for the Bayesian probit model"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model from a dataset CSV");
    fit_cmd->add_option("--input", fit_opt.input, "Training dataset CSV")
        ->required()
        ->check(CLI::ExistingFile);
    fit_cmd->add_option("--model", fit_opt.model, "Output model artifact path")->required();
    fit_cmd->add_option("--engine", fit_opt.engine, "State engine")
        ->check(CLI::IsMember({"auto", "dense", "lowrank"}))
        ->capture_default_str();
    fit_cmd->add_option("--tol", fit_opt.ep.tol, "Convergence tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fit_cmd->add_option("--max-sweeps", fit_opt.ep.max_sweeps, "Sweep budget")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fit_cmd->add_option("--damping", fit_opt.ep.damping, "Damping factor in (0,1]")
        ->check(CLI::Range(1e-6, 1.0))
        ->capture_default_str();
    fit_cmd->add_option("--prior-variance", fit_opt.prior_variance, "Prior variance nu^2")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fit_cmd->add_option("--text-dump", fit_opt.text_dump, "Also write a text export here");

    PredictOptions pred_opt;
    CLI::App* pred_cmd = app.add_subcommand("predict", "Predictive probabilities for test units");
    pred_cmd->add_option("--model", pred_opt.model, "Model artifact")
        ->required()
        ->check(CLI::ExistingFile);
    pred_cmd->add_option("--test", pred_opt.test, "Test covariate CSV")
        ->required()
        ->check(CLI::ExistingFile);
    pred_cmd->add_option("--output", pred_opt.output, "Output path")->required();

    SimstudyOptions sim_opt;
    CLI::App* sim_cmd = app.add_subcommand("simstudy", "EP vs. Gibbs-baseline accuracy study");
    sim_cmd->add_option("--output", sim_opt.output, "Report CSV path")->required();
    sim_cmd->add_option("--seed", sim_opt.seed, "Study seed")->capture_default_str();
    sim_cmd->add_option("--draws", sim_opt.draws, "Baseline retained draws")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--burn-in", sim_opt.burn_in, "Baseline burn-in")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sim_cmd->add_option("--prior-variance", sim_opt.prior_variance, "Prior variance nu^2")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--tol", sim_opt.ep.tol, "EP convergence tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--max-sweeps", sim_opt.ep.max_sweeps, "EP sweep budget")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--damping", sim_opt.ep.damping, "EP damping in (0,1]")
        ->check(CLI::Range(1e-6, 1.0))
        ->capture_default_str();
    sim_cmd->add_option("--jobs", sim_opt.jobs, "Worker threads (0 = logical cores)")
        ->capture_default_str();
    sim_cmd->add_flag("--quick", sim_opt.quick, "One scenario, one grid point, small baseline");

    OracleCheckOptions chk_opt;
    CLI::App* chk_cmd =
        app.add_subcommand("oracle-check", "Cross-check EP, quadrature and Gibbs fixtures");
    chk_cmd->add_option("--seed", chk_opt.seed, "Sampler seed")->capture_default_str();
    chk_cmd->add_option("--draws", chk_opt.draws, "Gibbs retained draws")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    chk_cmd->add_option("--burn-in", chk_opt.burn_in, "Gibbs burn-in")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    chk_cmd->add_option("--tol", chk_opt.tol, "EP convergence tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_opt);
        if (pred_cmd->parsed()) return cmd_predict(pred_opt);
        if (sim_cmd->parsed()) return cmd_simstudy(sim_opt);
        if (chk_cmd->parsed()) return cmd_oracle_check(chk_opt);
    } catch (const CsvError& e) {
        return fail("parse",
                    std::string(e.what()) + " (line " + std::to_string(e.line) + ", column " +
                        std::to_string(e.column) + ")",
                    kExitInput);
    } catch (const NonProgressError& e) {
        return fail("nonprogress", e.what(), kExitNonProgress);
    } catch (const std::invalid_argument& e) {
        return fail("validate", e.what(), kExitInput);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), kExitInput);
    }
    return kExitOk;
}
