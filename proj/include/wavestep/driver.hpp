#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "io.hpp"
#include "oracle.hpp"

namespace wavestep {

enum class SweepSpacing { linear, log };

struct SweepRequest {
    double emin = 0.0;
    double emax = 0.0;
    int count = 0;
    SweepSpacing spacing = SweepSpacing::linear;
};

inline std::vector<double> sweep_energies(const SweepRequest& rq) {
    if (rq.count < 1)
        throw ConfigError("sweep wants at least one energy");
    if (!(rq.emin > 0.0) || !(rq.emax >= rq.emin))
        throw ConfigError("sweep range must satisfy 0 < min <= max");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(rq.count));
    if (rq.count == 1) {
        out.push_back(rq.emin);
        return out;
    }
    if (rq.spacing == SweepSpacing::linear) {
        for (int i = 0; i < rq.count; ++i)
            out.push_back(rq.emin + (rq.emax - rq.emin) * i / (rq.count - 1));
    } else {
        const double la = std::log(rq.emin), lb = std::log(rq.emax);
        for (int i = 0; i < rq.count; ++i)
            out.push_back(std::exp(la + (lb - la) * i / (rq.count - 1)));
    }
    return out;
}

struct RunOptions {
    bool with_oracle = false;
    std::optional<SweepRequest> sweep;
    int jobs = 0; // 0 picks the hardware concurrency
    std::string out_dir = ".";
};

struct ScenarioOutcome {
    int exit_code = 0;
    std::vector<ScatteringResult> rows;
};

namespace detail {

inline OracleColumns oracle_for(const SimulationConfig& cfg, double E) {
    const ExactSolution sol = solve_exact(cfg.potential(), E, cfg.incident);
    return {sol.P_refl, sol.P_trans};
}

} // namespace detail

/// One energy per row, rows in energy order regardless of thread count.
inline std::vector<ScatteringResult> run_sweep(const SimulationConfig& base,
                                               const std::vector<double>& energies, int jobs) {
    const std::size_t n = energies.size();
    std::vector<ScatteringResult> rows(n);
    std::vector<std::exception_ptr> errors(n);

    unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));

    std::atomic<std::size_t> cursor{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n)
                return;
            try {
                SimulationConfig cfg = base;
                cfg.energy = energies[i];
                rows[i] = run_simulation(cfg).summary;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (std::thread& th : pool)
            th.join();
    }

    for (const std::exception_ptr& err : errors)
        if (err)
            std::rethrow_exception(err);
    return rows;
}

/// Runs a configuration to completion and writes the output tables.
/// Exit code 0 when everything converged, 3 otherwise.
inline ScenarioOutcome run_scenario(const SimulationConfig& cfg, const RunOptions& opts) {
    namespace fs = std::filesystem;
    cfg.validate(!opts.sweep.has_value());
    fs::create_directories(opts.out_dir);
    const auto path = [&](const char* name) { return (fs::path(opts.out_dir) / name).string(); };

    ScenarioOutcome outcome;

    if (opts.sweep) {
        const std::vector<double> energies = sweep_energies(*opts.sweep);
        outcome.rows = run_sweep(cfg, energies, opts.jobs);

        std::ofstream rf(path("result.tsv"));
        write_result_header(rf, opts.with_oracle);
        for (const ScatteringResult& row : outcome.rows) {
            std::optional<OracleColumns> oracle;
            if (opts.with_oracle)
                oracle = detail::oracle_for(cfg, row.E);
            write_result_row(rf, row, oracle);
            if (!row.converged)
                outcome.exit_code = 3;
        }
        return outcome;
    }

    const RunResult res = run_simulation(cfg);
    outcome.rows.push_back(res.summary);
    if (!res.summary.converged)
        outcome.exit_code = 3;

    {
        std::ofstream rf(path("result.tsv"));
        write_result_header(rf, opts.with_oracle);
        std::optional<OracleColumns> oracle;
        if (opts.with_oracle)
            oracle = detail::oracle_for(cfg, res.summary.E);
        write_result_row(rf, res.summary, oracle);
    }
    {
        const std::vector<double> xs = plot_grid(*cfg.x_left, *cfg.x_right, cfg.plot_points);
        const std::vector<cplx> psi = reconstruct(res.field, xs, res.summary.t_final);
        std::ofstream pf(path("psi.tsv"));
        write_psi_table(pf, xs, psi);
        if (!cfg.snapshot_times.empty()) {
            std::ofstream sf(path("snapshots.tsv"));
            write_snapshot_table(sf, res.field, cfg.snapshot_times, xs);
        }
    }
    {
        std::ofstream tf(path("trajectories.tsv"));
        write_trajectory_table(tf, res.trajectories, res.summary.t_final);
    }
    return outcome;
}

} // namespace wavestep
