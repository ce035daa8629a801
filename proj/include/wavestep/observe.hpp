#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "waves.hpp"

namespace wavestep {

/// One wave value seen at a monitor position.
struct MonitorRecord {
    double t = 0.0;
    double r = 0.0;
    double s = 0.0;
};

/// Change of the monitored value between consecutive records: the
/// probability estimate moves by dP, the complex wave value by damp.
struct MonitorJump {
    double t = 0.0;
    double dP = 0.0;
    double damp = 0.0;
    double P_after = 0.0;
};

/// Watches the outgoing wave at one end of the observation window. Each
/// passing correction leaves a record; the jump list drives convergence and
/// the error estimate. Probabilities are relative to the incident wave,
/// folded into prob_factor = Re(p_out) / (Re(p_in) r_inc^2).
class Monitor {
public:
    Monitor() = default;

    Monitor(double x, Dir outgoing, double prob_factor, double E, double hbar)
        : x_(x), outgoing_(outgoing), prob_factor_(prob_factor), E_(E), hbar_(hbar) {}

    double position() const { return x_; }
    Dir outgoing() const { return outgoing_; }

    void on_wave(double t, double r, double s) {
        const cplx now = std::polar(r, s / hbar_);
        cplx before{0.0, 0.0};
        if (!records_.empty()) {
            const MonitorRecord& prev = records_.back();
            before = std::polar(prev.r, (prev.s - E_ * (t - prev.t)) / hbar_);
        }
        const double damp = std::abs(now - before);
        const double guard = 1e-14 * std::max(1.0, std::max(r, std::abs(before)));
        if (damp > guard) {
            const double P_prev = records_.empty() ? 0.0 : latest_P();
            const double P_new = prob_factor_ * r * r;
            jumps_.push_back({t, std::abs(P_new - P_prev), damp, P_new});
        }
        records_.push_back({t, r, s});
    }

    void add_exit_weight(double w) { weight_exited_ += w; }
    double exited_weight() const { return weight_exited_; }

    const std::vector<MonitorRecord>& records() const { return records_; }
    const std::vector<MonitorJump>& jumps() const { return jumps_; }

    bool quiet() const { return records_.empty(); }

    /// Probability carried by the most recent recorded value.
    double latest_P() const {
        if (records_.empty())
            return 0.0;
        const double r = records_.back().r;
        return prob_factor_ * r * r;
    }

    double last_dP() const { return jumps_.empty() ? kInf : jumps_.back().dP; }

    int jumps_at_least(double tol) const {
        int n = 0;
        for (const MonitorJump& j : jumps_)
            if (j.dP >= tol)
                ++n;
        return n;
    }

    /// Total probability in distinct pulses: every rise of the recorded
    /// amplitude contributes its plateau once. Used for finite-train runs
    /// where the outgoing wave arrives as separated pulses.
    double packet_probability() const {
        double sum = 0.0;
        double prev_r = 0.0;
        for (const MonitorRecord& rec : records_) {
            if (rec.r > prev_r + 1e-14)
                sum += prob_factor_ * rec.r * rec.r;
            prev_r = rec.r;
        }
        return sum;
    }

private:
    double x_ = 0.0;
    Dir outgoing_ = Dir::right;
    double prob_factor_ = 1.0;
    double E_ = 0.0;
    double hbar_ = 1.0;
    double weight_exited_ = 0.0;
    std::vector<MonitorRecord> records_;
    std::vector<MonitorJump> jumps_;
};

/// A monitor together with whether the run can be declared converged before
/// it has seen anything. Monitors on structurally dark sides (hard wall or
/// forbidden outer region, or no steps to reflect from) are not required.
struct MonitorRole {
    const Monitor* monitor = nullptr;
    bool required = true;
};

/// Every required monitor has settled: it has seen at least one jump and
/// the most recent one moved its probability estimate by less than tol.
inline bool converged(std::span<const MonitorRole> roles, double tol, int min_cycles, int cycles_used) {
    if (cycles_used < min_cycles)
        return false;
    for (const MonitorRole& role : roles) {
        if (!role.required)
            continue;
        if (role.monitor->jumps().empty())
            return false;
        if (role.monitor->last_dP() >= tol)
            return false;
    }
    return true;
}

/// Summary of one scattering run.
struct ScatteringResult {
    double E = 0.0;
    double P_refl = 0.0;
    double P_trans = 0.0;
    double error_bar = 0.0;
    int cycles = 0;
    double t_final = 0.0;
    bool converged = false;
};

/// Total wave on a grid of points at one instant.
inline std::vector<cplx> reconstruct(const WaveField& field, std::span<const double> xs, double t) {
    std::vector<cplx> out;
    out.reserve(xs.size());
    for (double x : xs)
        out.push_back(field.superpose(x, t));
    return out;
}

} // namespace wavestep
