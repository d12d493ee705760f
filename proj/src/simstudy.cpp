#include "epprobit/simstudy.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "epprobit/predictive.hpp"
#include "epprobit/rng.hpp"
#include "epprobit/special_fn.hpp"

namespace epprobit {

namespace {

constexpr std::array<Scenario, 5> kScenarios = {Scenario::IidWeak, Scenario::IidStrong,
                                                Scenario::Correlated, Scenario::Sparse,
                                                Scenario::HeavyTail};

// Sub-stream tags for the deterministic per-cell RNG derivation.
enum CellStream : std::uint64_t {
    kStreamTrainX = 1,
    kStreamBeta = 2,
    kStreamLabels = 3,
    kStreamTestX = 4,
    kStreamGibbs = 5,
};

std::uint64_t cell_seed(const ScenarioSpec& spec, int p, std::uint64_t stream) {
    const auto scenario_index =
        static_cast<std::uint64_t>(std::find(kScenarios.begin(), kScenarios.end(),
                                             spec.scenario_id) -
                                   kScenarios.begin());
    return mix_seed(mix_seed(mix_seed(spec.seed, scenario_index),
                             static_cast<std::uint64_t>(p)),
                    stream);
}

// Standardized t_5-like variate: z * sqrt(3 / chi2_5).
double heavy_tail_draw(Rng& rng) {
    double chi2 = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double g = rng.normal();
        chi2 += g * g;
    }
    return rng.normal() * std::sqrt(3.0 / chi2);
}

Eigen::MatrixXd draw_covariates(Scenario scenario, Eigen::Index rows, Eigen::Index cols,
                                Rng& rng) {
    Eigen::MatrixXd X(rows, cols);
    switch (scenario) {
        case Scenario::Correlated: {
            const double rho = 0.5;
            const double a = std::sqrt(rho);
            const double b = std::sqrt(1.0 - rho);
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double shared = rng.normal();
                for (Eigen::Index j = 0; j < cols; ++j) {
                    X(i, j) = a * shared + b * rng.normal();
                }
            }
            break;
        }
        case Scenario::HeavyTail:
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (Eigen::Index j = 0; j < cols; ++j) {
                    X(i, j) = heavy_tail_draw(rng);
                }
            }
            break;
        default:
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (Eigen::Index j = 0; j < cols; ++j) {
                    X(i, j) = rng.normal();
                }
            }
    }
    return X;
}

Eigen::VectorXd draw_beta(Scenario scenario, Eigen::Index p, Rng& rng) {
    Eigen::VectorXd beta(p);
    switch (scenario) {
        case Scenario::IidWeak:
            for (Eigen::Index j = 0; j < p; ++j) beta[j] = 0.5 * rng.normal();
            break;
        case Scenario::IidStrong:
            for (Eigen::Index j = 0; j < p; ++j) beta[j] = 2.0 * rng.normal();
            break;
        case Scenario::Sparse: {
            beta.setZero();
            // Partial Fisher-Yates pick of the support coordinates.
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
            for (Eigen::Index j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
            const Eigen::Index nonzeros = std::min<Eigen::Index>(10, p);
            for (Eigen::Index j = 0; j < nonzeros; ++j) {
                const auto span = static_cast<std::uint64_t>(p - j);
                const auto pick = j + static_cast<Eigen::Index>(rng.next_u64() % span);
                std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
                beta[idx[static_cast<std::size_t>(j)]] = 2.0 * rng.normal();
            }
            break;
        }
        default:  // Correlated, HeavyTail
            for (Eigen::Index j = 0; j < p; ++j) beta[j] = rng.normal();
    }
    return beta;
}

StudyRow run_cell(const ScenarioSpec& spec, int p) {
    auto [train, x_test] = generate_synthetic(spec, p);

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const FitResult fitted = fit(train, spec.ep, Engine::Auto);
    const auto t1 = clock::now();
    const std::vector<PredictiveResult> preds = predict_batch(fitted.posterior, x_test);
    const auto t2 = clock::now();

    GibbsSpec baseline = spec.baseline;
    baseline.seed = cell_seed(spec, p, kStreamGibbs);
    const auto t3 = clock::now();
    const GibbsResult base = gibbs_predictive(train, x_test, baseline);
    const auto t4 = clock::now();

    std::vector<double> diffs(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        diffs[i] = std::abs(preds[i].probability - base.probabilities[static_cast<Eigen::Index>(i)]);
    }

    StudyRow row;
    row.scenario = spec.scenario_id;
    row.p = p;
    row.median_abs_diff = quantile_linear(diffs, 0.5);
    row.q1 = quantile_linear(diffs, 0.25);
    row.q3 = quantile_linear(diffs, 0.75);
    const double fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    const double predict_seconds = std::chrono::duration<double>(t2 - t1).count();
    row.ep_seconds = fit_seconds + predict_seconds;
    row.baseline_seconds = std::chrono::duration<double>(t4 - t3).count();
    row.ep_sweeps = fitted.diagnostics.sweeps_run;
    row.skipped_updates = fitted.diagnostics.skipped_updates;
    return row;
}

}  // namespace

std::span<const Scenario> all_scenarios() { return kScenarios; }

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::IidWeak: return "iid-weak";
        case Scenario::IidStrong: return "iid-strong";
        case Scenario::Correlated: return "correlated";
        case Scenario::Sparse: return "sparse";
        case Scenario::HeavyTail: return "heavy-tail";
    }
    return "unknown";
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
    for (Scenario s : kScenarios) {
        if (scenario_name(s) == name) return s;
    }
    return std::nullopt;
}

std::pair<Dataset, Eigen::MatrixXd> generate_synthetic(const ScenarioSpec& spec, int p) {
    if (spec.n < 1 || spec.n_test < 1 || p < 1) {
        throw std::invalid_argument("generate_synthetic: sizes must be >= 1");
    }
    Rng rng_x(cell_seed(spec, p, kStreamTrainX));
    Rng rng_beta(cell_seed(spec, p, kStreamBeta));
    Rng rng_labels(cell_seed(spec, p, kStreamLabels));
    Rng rng_test(cell_seed(spec, p, kStreamTestX));

    const Eigen::MatrixXd X = draw_covariates(spec.scenario_id, spec.n, p, rng_x);
    const Eigen::VectorXd beta = draw_beta(spec.scenario_id, p, rng_beta);
    Eigen::VectorXi y(spec.n);
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        y[i] = rng_labels.uniform01() < norm_cdf(X.row(i).dot(beta)) ? 1 : 0;
    }
    Eigen::MatrixXd x_test = draw_covariates(spec.scenario_id, spec.n_test, p, rng_test);
    return {Dataset(X, y, spec.prior_variance), std::move(x_test)};
}

StudyReport run_study(const ScenarioSpec& spec, int jobs) {
    return run_study(std::span<const ScenarioSpec>(&spec, 1), jobs);
}

StudyReport run_study(std::span<const ScenarioSpec> specs, int jobs) {
    struct Cell {
        const ScenarioSpec* spec;
        int p;
    };
    std::vector<Cell> cells;
    for (const ScenarioSpec& spec : specs) {
        if (spec.p_grid.empty()) {
            throw std::invalid_argument("run_study: empty p grid");
        }
        if (!std::is_sorted(spec.p_grid.begin(), spec.p_grid.end())) {
            throw std::invalid_argument("run_study: p grid must be ascending");
        }
        for (int p : spec.p_grid) cells.push_back(Cell{&spec, p});
    }

    std::vector<StudyRow> rows(cells.size());
    const int workers =
        std::clamp<int>(jobs, 1, static_cast<int>(cells.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            rows[i] = run_cell(*cells[i].spec, cells[i].p);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                try {
                    rows[i] = run_cell(*cells[i].spec, cells[i].p);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    return StudyReport{std::move(rows)};
}

double quantile_linear(std::vector<double> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("quantile_linear: empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("quantile_linear: q outside [0,1]");
    }
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace epprobit
