// Acceptance gate: every numbered block checks one contract item end to end
// and prints a single verdict line. Exits nonzero if any block fails.
#include "wavestep/dynamics.hpp"
#include "wavestep/observe.hpp"
#include "wavestep/oracle.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <random>
#include <vector>

using namespace wavestep;

namespace {

int failures = 0;

void verdict(int idx, bool ok, const char* label, const char* detail) {
    std::printf("[%s] %2d  %-42s %s\n", ok ? "PASS" : "FAIL", idx, label, detail);
    if (!ok)
        ++failures;
}

SimulationConfig rect_cfg(double V0, double w, double E, double tol) {
    SimulationConfig cfg;
    cfg.steps = {0.0, w};
    cfg.values = {0.0, V0, 0.0};
    cfg.energy = E;
    cfg.x_left = -1.0;
    cfg.x_right = w + 1.0;
    cfg.launch_interval = {{-4.0, -1.0}};
    cfg.launch_points = 3;
    cfg.tol = tol;
    return cfg;
}

SimulationConfig step_cfg(double E) {
    SimulationConfig cfg;
    cfg.steps = {0.0};
    cfg.values = {0.0, 0.009};
    cfg.energy = E;
    cfg.x_left = -1.0;
    cfg.x_right = 1.0;
    cfg.launch_interval = {{-4.0, -1.0}};
    cfg.launch_points = 3;
    return cfg;
}

SimulationConfig wall_cfg() {
    SimulationConfig cfg;
    cfg.steps = {0.0};
    cfg.values = {0.0, kInf};
    cfg.energy = 0.018;
    cfg.x_left = -4.0;
    cfg.x_right = 0.5;
    cfg.launch_interval = {{-7.0, -4.0}};
    cfg.launch_points = 3;
    return cfg;
}

} // namespace

int main() {
    char buf[256];
    std::printf("acceptance checks: exact scattering engine vs builtin oracle\n");

    // 1. simulated transmission tracks the oracle across barrier widths
    try {
        const double V0 = 0.018;
        const double lo = 0.2 * V0, hi = 4.0 * V0;
        double worst = 0.0;
        int runs = 0;
        bool all_conv = true;
        for (double w : {0.5, 1.0, 2.0}) {
            const PiecewisePotential pot({0.0, w}, {0.0, V0, 0.0}, 2000.0, 1.0);
            for (int i = 0; i < 50; ++i) {
                const double E = lo + (hi - lo) * (i + 0.5) / 50.0;
                if (std::abs(E - V0) < 0.05 * V0)
                    continue;
                const auto res = run_simulation(rect_cfg(V0, w, E, 1e-4));
                all_conv = all_conv && res.summary.converged;
                const double d = std::abs(res.summary.P_trans - solve_exact(pot, E).P_trans);
                worst = std::max(worst, d);
                ++runs;
            }
        }
        std::snprintf(buf, sizeof buf, "worst |dP_trans| %.3e over %d runs (limit 2e-4)",
                      worst, runs);
        verdict(1, all_conv && worst < 2e-4, "barrier sweep matches oracle", buf);
    } catch (const std::exception& e) {
        verdict(1, false, "barrier sweep matches oracle", e.what());
    }

    // 2. cycle counts at the reference energies
    try {
        const auto above = run_simulation(rect_cfg(0.018, 1.0, 0.036, 1e-4));
        const auto below = run_simulation(rect_cfg(0.018, 0.5, 0.009, 1e-4));
        const auto peak_hi = run_simulation(rect_cfg(0.018, 1.0, 1.02 * 0.018, 1e-4));
        const auto peak_lo = run_simulation(rect_cfg(0.018, 0.5, 0.98 * 0.018, 1e-4));
        const bool ok = above.summary.converged && above.summary.cycles == 3 &&
                        below.summary.converged && below.summary.cycles == 2 &&
                        peak_hi.summary.converged && peak_hi.summary.cycles >= 5 &&
                        peak_lo.summary.converged && peak_lo.summary.cycles >= 5;
        std::snprintf(buf, sizeof buf, "got %d, %d, %d, %d (want 3, 2, >=5, >=5)",
                      above.summary.cycles, below.summary.cycles, peak_hi.summary.cycles,
                      peak_lo.summary.cycles);
        verdict(2, ok, "convergence cycle counts", buf);
    } catch (const std::exception& e) {
        verdict(2, false, "convergence cycle counts", e.what());
    }

    // 3. monitor jumps decay geometrically at the interior reflection rate
    try {
        const auto res = run_simulation(rect_cfg(0.018, 1.0, 0.036, 1e-10));
        const auto& js = res.monitor_left.jumps();
        // skip the first arrival: decay sets in once recycling starts
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 1; i < js.size(); ++i) {
            const double x = static_cast<double>(i);
            const double y = std::log(js[i].damp);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double p = std::sqrt(2.0 * 2000.0 * 0.036);
        const double q = std::sqrt(2.0 * 2000.0 * (0.036 - 0.018));
        const double rho = (p - q) / (p + q);
        const double ref = std::log(rho * rho);
        std::snprintf(buf, sizeof buf, "slope %.7f vs ln(R_step) %.7f from %d jumps (tol 1e-3)",
                      slope, ref, n);
        verdict(3, res.summary.converged && n >= 3 && std::abs(slope - ref) < 1e-3,
                "geometric jump decay", buf);
    } catch (const std::exception& e) {
        verdict(3, false, "geometric jump decay", e.what());
    }

    // 4. well transparency at the oracle-located resonance
    try {
        const auto fit = barrier_resonances(-0.009, 2.0, 2000.0, 1.0, 1e-4, 0.02);
        const double En = fit.empty() ? 0.0 : fit.front();
        bool ok = !fit.empty() && std::abs(En - 8.696e-4) < 1e-6;
        double P_refl = 1.0;
        if (ok) {
            const auto res = run_simulation(rect_cfg(-0.009, 2.0, En, 1e-4));
            P_refl = res.summary.P_refl;
            ok = res.summary.converged && P_refl < 2e-4;
        }
        std::snprintf(buf, sizeof buf, "E %.6e gives P_refl %.3e (limit 2e-4)", En, P_refl);
        verdict(4, ok, "resonant well turns transparent", buf);
    } catch (const std::exception& e) {
        verdict(4, false, "resonant well turns transparent", e.what());
    }

    // 5. one-spawn exactness on the up-step
    try {
        const auto res = run_simulation(step_cfg(0.018));
        const double p = std::sqrt(2.0 * 2000.0 * 0.018);
        const double q = std::sqrt(2.0 * 2000.0 * 0.009);
        const double R = ((p - q) / (p + q)) * ((p - q) / (p + q));
        const bool ok = res.summary.converged && res.summary.cycles == 1 &&
                        std::abs(res.summary.P_refl - R) <= 1e-12 &&
                        std::abs(res.summary.P_trans - (1.0 - R)) <= 1e-12 &&
                        std::abs(res.summary.P_refl + res.summary.P_trans - 1.0) <= 1e-12;
        std::snprintf(buf, sizeof buf, "P_refl %.15f, P_trans %.15f, %d cycle(s)",
                      res.summary.P_refl, res.summary.P_trans, res.summary.cycles);
        verdict(5, ok, "up-step probabilities exact in one pass", buf);
    } catch (const std::exception& e) {
        verdict(5, false, "up-step probabilities exact in one pass", e.what());
    }

    // 6. reconstructed wave matches the oracle under the step
    try {
        const auto res = run_simulation(step_cfg(0.0045));
        const PiecewisePotential pot({0.0}, {0.0, 0.009}, 2000.0, 1.0);
        const auto exact = solve_exact(pot, 0.0045);
        const double tf = res.summary.t_final;
        const cplx clock = std::exp(cplx{0.0, -0.0045 * tf});
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = -1.0 + 2.0 * i / 400.0;
            worst = std::max(worst, std::abs(res.field.superpose(x, tf) - exact.psi(x) * clock));
        }
        std::snprintf(buf, sizeof buf, "max pointwise error %.3e on [-1, 1] (limit 1e-10)",
                      worst);
        verdict(6, res.summary.converged && worst < 1e-10, "evanescent wave profile", buf);
    } catch (const std::exception& e) {
        verdict(6, false, "evanescent wave profile", e.what());
    }

    // 7. hard wall: total reflection and standing-wave nodes
    try {
        const auto res = run_simulation(wall_cfg());
        const double k = std::sqrt(2.0 * 2000.0 * 0.018);
        const double pi = std::acos(-1.0);
        double worst = 0.0;
        for (int n = 1; n <= 5; ++n)
            worst = std::max(worst,
                             std::abs(res.field.superpose(-n * pi / k, res.summary.t_final)));
        const bool ok = res.summary.converged && res.summary.P_refl == 1.0 &&
                        res.summary.P_trans == 0.0 && worst < 1e-10;
        std::snprintf(buf, sizeof buf, "P_refl %.17g, worst |psi| at nodes %.3e (limit 1e-10)",
                      res.summary.P_refl, worst);
        verdict(7, ok, "hard wall reflects everything", buf);
    } catch (const std::exception& e) {
        verdict(7, false, "hard wall reflects everything", e.what());
    }

    // 8. reported probabilities are ensemble-size independent
    try {
        std::vector<SimulationConfig> scenarios;
        scenarios.push_back(rect_cfg(0.018, 1.0, 0.036, 1e-4));
        scenarios.push_back(rect_cfg(0.018, 0.5, 0.009, 1e-4));
        scenarios.push_back(rect_cfg(0.018, 1.0, 1.02 * 0.018, 1e-4));
        const auto fit = barrier_resonances(-0.009, 2.0, 2000.0, 1.0, 1e-4, 0.02);
        scenarios.push_back(rect_cfg(-0.009, 2.0, fit.front(), 1e-4));
        scenarios.push_back(step_cfg(0.018));
        scenarios.push_back(step_cfg(0.0045));
        scenarios.push_back(wall_cfg());
        double worst = 0.0;
        bool all_conv = true;
        for (const auto& base : scenarios) {
            auto one = base;
            one.launch_points = 1;
            auto many = base;
            many.launch_points = 100;
            const auto a = run_simulation(one);
            const auto b = run_simulation(many);
            all_conv = all_conv && a.summary.converged && b.summary.converged;
            worst = std::max(worst, std::abs(a.summary.P_refl - b.summary.P_refl));
            worst = std::max(worst, std::abs(a.summary.P_trans - b.summary.P_trans));
        }
        std::snprintf(buf, sizeof buf,
                      "worst |dP| %.3e between 1 and 100 seeds, %zu scenarios (limit 1e-12)",
                      worst, scenarios.size());
        verdict(8, all_conv && worst <= 1e-12, "one trajectory per component suffices", buf);
    } catch (const std::exception& e) {
        verdict(8, false, "one trajectory per component suffices", e.what());
    }

    // 9. conservation, phase linearity, and determinism properties
    try {
        auto above_cfg = rect_cfg(0.018, 1.0, 0.036, 1e-4);
        above_cfg.launch_points = 51;
        auto tunnel_cfg = rect_cfg(0.018, 0.5, 0.009, 1e-4);
        tunnel_cfg.launch_points = 51;

        const auto above = run_simulation(above_cfg);
        const auto tunnel = run_simulation(tunnel_cfg);

        double worst_flux = 0.0, worst_turn = 0.0;
        for (const auto* res : {&above, &tunnel}) {
            for (const auto& sp : res->splits) {
                if (sp.wall)
                    continue;
                const double f_in = std::real(sp.p_inc) * sp.r_inc * sp.r_inc;
                if (f_in == 0.0)
                    continue;
                if (sp.trans_allowed) {
                    const double f_out = std::real(sp.p_inc) * sp.r_refl * sp.r_refl +
                                         std::real(sp.p_trans) * sp.r_trans * sp.r_trans;
                    worst_flux = std::max(worst_flux, std::abs(f_out - f_in) / f_in);
                } else {
                    worst_turn =
                        std::max(worst_turn, std::abs(sp.r_refl - sp.r_inc) / sp.r_inc);
                }
            }
        }

        double worst_phase = 0.0;
        for (double t : {450.0, 900.0, 1500.0, above.summary.t_final}) {
            std::map<std::pair<int, int>, std::vector<const Trajectory*>> groups;
            for (const auto& tr : above.trajectories)
                if (tr.alive_at(t))
                    groups[{component_key(tr.comp), tr.order}].push_back(&tr);
            for (const auto& [key, list] : groups) {
                for (std::size_t i = 1; i < list.size(); ++i) {
                    const auto* a = list[0];
                    const auto* b = list[i];
                    const double ds = a->s_at(t) - b->s_at(t);
                    const double dx = std::real(a->position(t)) - std::real(b->position(t));
                    worst_phase = std::max(worst_phase, std::abs(ds - std::real(a->p) * dx));
                }
            }
        }

        const auto again = run_simulation(above_cfg);
        bool identical = again.events.size() == above.events.size() &&
                         again.trajectories.size() == above.trajectories.size() &&
                         again.summary.P_refl == above.summary.P_refl &&
                         again.summary.P_trans == above.summary.P_trans &&
                         again.summary.error_bar == above.summary.error_bar &&
                         again.summary.t_final == above.summary.t_final;
        for (std::size_t i = 0; identical && i < again.events.size(); ++i)
            identical = again.events[i].t == above.events[i].t &&
                        again.events[i].kind == above.events[i].kind &&
                        again.events[i].where == above.events[i].where &&
                        again.events[i].subject == above.events[i].subject;
        for (std::size_t i = 0; identical && i < again.trajectories.size(); ++i) {
            const auto& x = again.trajectories[i];
            const auto& y = above.trajectories[i];
            identical = x.t0 == y.t0 && x.x0 == y.x0 && x.p == y.p && x.r == y.r &&
                        x.s0 == y.s0 && x.weight == y.weight && x.death_t == y.death_t;
        }

        const bool ok = above.summary.converged && tunnel.summary.converged &&
                        worst_flux <= 1e-12 && worst_turn <= 1e-12 && worst_phase <= 1e-10 &&
                        identical;
        std::snprintf(buf, sizeof buf,
                      "flux %.2e, closed-side turn %.2e, phase %.2e, rerun %s",
                      worst_flux, worst_turn, worst_phase,
                      identical ? "identical" : "DIFFERS");
        verdict(9, ok, "split properties and determinism", buf);
    } catch (const std::exception& e) {
        verdict(9, false, "split properties and determinism", e.what());
    }

    // 10. closed-form momentum and action helpers
    try {
        std::mt19937 rng(20260819u);
        std::uniform_real_distribution<double> draw_E(1e-4, 0.02);
        std::uniform_real_distribution<double> draw_f(1.1, 4.0);
        double worst_p = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double E = draw_E(rng);
            const double V0 = E * draw_f(rng);
            const double left = tunneling_momentum(0.0, E, V0, 2000.0, 1.0);
            // tiny positive x takes the forbidden branch at its x -> 0 limit
            const double right = tunneling_momentum(1e-30, E, V0, 2000.0, 1.0);
            worst_p = std::max(worst_p, std::abs(right - left) / left);
        }

        const double k = std::sqrt(2.0 * 2000.0 * 0.018);
        double worst_s = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = -3.0 + 2.99 * i / 99.0;
            worst_s = std::max(worst_s, std::abs(hardwall_action(x, k, k / 2000.0, 0.0,
                                                                 2000.0, 1.0).s - k * x));
        }

        const double F = 2.0 * k / 2000.0, B = 0.7;
        double worst_cot = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = -3.0 + 2.9 * i / 99.0;
            const auto hw = hardwall_action(x, k, F, B, 2000.0, 1.0);
            const double G = 2000.0 * F * (-std::cos(k * x) / std::sin(k * x) / k + B);
            const double resid = std::abs(-std::cos(hw.s) / std::sin(hw.s) - G);
            worst_cot = std::max(worst_cot, resid / (1.0 + std::abs(G)));
        }

        const bool ok = worst_p <= 1e-12 && worst_s <= 1e-12 && worst_cot <= 1e-10;
        std::snprintf(buf, sizeof buf,
                      "momentum seam %.2e (1e-12), plane action %.2e (1e-12), cot %.2e (1e-10)",
                      worst_p, worst_s, worst_cot);
        verdict(10, ok, "momentum profile and wall action forms", buf);
    } catch (const std::exception& e) {
        verdict(10, false, "momentum profile and wall action forms", e.what());
    }

    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
