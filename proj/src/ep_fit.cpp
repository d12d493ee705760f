#include <cassert>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "epprobit/ep.hpp"
#include "epprobit/special_fn.hpp"

namespace epprobit {

NonProgressError::NonProgressError(const std::string& what, FitDiagnostics diag)
    : std::runtime_error(what), diagnostics(std::move(diag)) {}

SiteUpdateResult site_update(int y, double d, double c) {
    if (!(d > 0.0)) {
        throw std::domain_error("site_update: cavity quadratic form must be positive");
    }
    SiteUpdateResult out;
    out.s = (2.0 * y - 1.0) / std::sqrt(1.0 + d);
    out.tau = out.s * c;
    const double z1 = zeta1(out.tau);
    const double z2 = zeta2(out.tau);
    out.k = -z2 / (1.0 + d + z2 * d);
    out.m = z1 * out.s + out.k * c + out.k * z1 * out.s * d;
    assert(out.k > 0.0);  // zeta2 in (-1,0) forces this
    return out;
}

namespace {

void validate(const EpConfig& cfg) {
    if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol)) {
        throw std::invalid_argument("EpConfig: tol must be positive");
    }
    if (cfg.max_sweeps < 1) {
        throw std::invalid_argument("EpConfig: max_sweeps must be >= 1");
    }
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) {
        throw std::invalid_argument("EpConfig: damping must be in (0,1]");
    }
}

template <class State>
FitResult run_fit(State state, const EpConfig& cfg, Engine engine_used) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset& data = state.data();
    const Eigen::Index n = data.n();

    FitDiagnostics diag;
    diag.engine_used = engine_used;

    // A zero covariate row contributes a constant likelihood factor; such
    // sites stay at k = m = 0 and never enter the sweep.
    std::vector<char> active(static_cast<std::size_t>(n));
    Eigen::Index n_active = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        active[static_cast<std::size_t>(i)] = data.X.row(i).squaredNorm() > 0.0;
        n_active += active[static_cast<std::size_t>(i)] ? 1 : 0;
    }

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        Eigen::Index skipped = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            const auto cav = state.cavity(i);
            if (!cav || !(cav->d > 0.0)) {
                ++skipped;
                continue;
            }
            const SiteUpdateResult upd = site_update(data.y[i], cav->d, cav->c);
            const auto deltas = state.apply_update(i, upd.k, upd.m, cfg.damping);
            if (!deltas) {
                ++skipped;
                continue;
            }
            max_delta = std::max({max_delta, deltas->dk, deltas->dm});
        }
        diag.skipped_updates += skipped;
        diag.max_delta_trace.push_back(max_delta);
        diag.sweeps_run = sweep;
        if (n_active > 0 && skipped == n_active) {
            diag.elapsed_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            throw NonProgressError(
                "fit: every active site skipped in sweep " + std::to_string(sweep), diag);
        }
        if (max_delta <= cfg.tol) {
            diag.converged = true;
            break;
        }
    }

    diag.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return FitResult{state.posterior(), state.sites(), diag};
}

}  // namespace

FitResult fit(const Dataset& data, const EpConfig& cfg, Engine engine) {
    validate(cfg);
    Engine chosen = engine;
    if (chosen == Engine::Auto) {
        chosen = data.p() <= data.n() ? Engine::Dense : Engine::LowRank;
    }
    auto shared = std::make_shared<const Dataset>(data);
    if (chosen == Engine::Dense) {
        return run_fit(EpStateDense(std::move(shared)), cfg, Engine::Dense);
    }
    return run_fit(EpStateLowRank(std::move(shared)), cfg, Engine::LowRank);
}

}  // namespace epprobit
