#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <queue>
#include <vector>

#include "config.hpp"
#include "observe.hpp"
#include "potential.hpp"
#include "waves.hpp"

namespace wavestep {

/// Amplitude scaled and phase advanced by a complex factor, the phase kept
/// unwrapped relative to the input.
inline PolarValue apply_amplitude_factor(cplx coef, double r, double s, double hbar) {
    return {r * std::abs(coef), s + hbar * std::arg(coef)};
}

/// Raw outcome of splitting an incident wave at a step.
struct LocalSplit {
    double r_refl = 0.0, s_refl = 0.0;
    double r_trans = 0.0, s_trans = 0.0;
    bool has_trans = false;
};

/// Local splitting rule at a step. Momenta are the canonical region values,
/// positive real or positive imaginary; an infinite imaginary far momentum
/// is a hard wall and reflects in full with half a turn of phase.
inline LocalSplit split_at_step(cplx p_inc, cplx p_trans, double r_inc, double s_inc, double hbar) {
    LocalSplit out;
    if (std::isinf(std::imag(p_trans))) {
        out.r_refl = r_inc;
        out.s_refl = s_inc + hbar * std::acos(-1.0);
        return out;
    }
    const cplx sum = p_inc + p_trans;
    if (std::abs(sum) < 1e-12 * (std::abs(p_inc) + std::abs(p_trans) + 1.0))
        throw DegenerateMomenta("vanishing momentum sum at step");
    const PolarValue refl = apply_amplitude_factor((p_inc - p_trans) / sum, r_inc, s_inc, hbar);
    const PolarValue trans = apply_amplitude_factor(2.0 * p_inc / sum, r_inc, s_inc, hbar);
    out.r_refl = refl.r;
    out.s_refl = refl.s;
    out.r_trans = trans.r;
    out.s_trans = trans.s;
    out.has_trans = true;
    return out;
}

/// One incident contribution processed at a step, kept for invariant checks:
/// the raw reflected and transmitted shares before merging with the other side.
struct SpawnSplit {
    double t = 0.0;
    int step = 0;
    ComponentId incident;
    cplx p_inc{0.0, 0.0};
    cplx p_trans{0.0, 0.0};
    double r_inc = 0.0, s_inc = 0.0;
    double r_refl = 0.0, s_refl = 0.0;
    double r_trans = 0.0, s_trans = 0.0;
    bool trans_allowed = false; // far side carries flux
    bool wall = false;
    bool from_wave = true; // leading-edge update rather than an ensemble arrival
};

/// Processed event, kept to compare runs for determinism.
struct EventRecord {
    double t = 0.0;
    int kind = 0;
    int where = 0;
    long subject = 0;
};

/// Everything a run produces.
struct RunResult {
    ScatteringResult summary;
    WaveField field;
    Monitor monitor_left, monitor_right;
    std::vector<Trajectory> trajectories;
    std::vector<SpawnSplit> splits;
    std::vector<EventRecord> events;
};

/// Event-driven propagation of the counter-propagating decomposition.
///
/// The wave state lives in per-component plane-wave segments that are exact
/// between events, so the only work happens when a leading edge reaches a
/// step or a window edge. The trajectory ensemble rides on top of the wave
/// state and never feeds back into it: ensemble size cannot change any
/// reported probability.
class Engine {
public:
    explicit Engine(const SimulationConfig& cfg) : cfg_(cfg), pot_(cfg.potential()) {
        cfg_.validate();
        nsteps_ = pot_.step_count();
        E_ = *cfg_.energy;
        hbar_ = pot_.hbar();
        mass_ = pot_.mass();
        xL_ = *cfg_.x_left;
        xR_ = *cfg_.x_right;

        const int nreg = pot_.region_count();
        pmag_.resize(static_cast<std::size_t>(nreg));
        speed_.resize(static_cast<std::size_t>(nreg));
        wall_.resize(static_cast<std::size_t>(nreg));
        allowed_.resize(static_cast<std::size_t>(nreg));
        for (int j = 0; j < nreg; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            wall_[ju] = pot_.wall(j);
            pmag_[ju] = wall_[ju] ? cplx{0.0, kInf} : pot_.region_momentum(E_, j);
            speed_[ju] = wall_[ju] ? 0.0 : std::abs(pmag_[ju]) / mass_;
            allowed_[ju] = !wall_[ju] && std::real(pmag_[ju]) > 0.0;
        }
        field_ = WaveField(pot_);
    }

    RunResult run() {
        seed();
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            if (frozen_ && ev.t > horizon_)
                break;
            queue_.pop();
            events_.push_back({ev.t, ev.kind, ev.where, ev.subject});
            switch (ev.kind) {
            case wave_step:
                last_wave_t_ = ev.t;
                update_outgoing(ev.where, ev.t, true);
                break;
            case wave_edge:
                last_wave_t_ = ev.t;
                handle_wave_edge(ev);
                break;
            case traj_step:
                handle_traj_step(ev);
                break;
            case traj_edge:
                handle_traj_edge(ev);
                break;
            }
        }
        if (!frozen_)
            declare(last_wave_t_, true, true); // nothing left in flight: state is final
        return assemble();
    }

private:
    enum EvKind : int { wave_step = 0, wave_edge = 1, traj_step = 2, traj_edge = 3 };

    struct Event {
        double t;
        int kind;
        int where;
        long subject;
        long seq;
    };

    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t)
                return a.t > b.t;
            if (a.kind != b.kind)
                return a.kind > b.kind;
            if (a.where != b.where)
                return a.where > b.where;
            if (a.subject != b.subject)
                return a.subject > b.subject;
            return a.seq > b.seq;
        }
    };

    struct Target {
        enum What { step, edge, none } what;
        int index; // step index, or 0 = left edge, 1 = right edge
        double x;
    };

    cplx p_signed(int region, Dir d) const {
        const cplx p = pmag_[static_cast<std::size_t>(region)];
        return d == Dir::right ? p : -p;
    }

    Target next_target(int region, Dir d) const {
        if (d == Dir::right) {
            if (region < nsteps_)
                return {Target::step, region, pot_.step_position(region)};
            return {Target::edge, 1, xR_};
        }
        if (region > 0)
            return {Target::step, region - 1, pot_.step_position(region - 1)};
        return {Target::edge, 0, xL_};
    }

    void seed() {
        const auto [a, b] = cfg_.launch();
        const int inc_region = cfg_.incident == Side::left ? 0 : nsteps_;
        const Dir inc_dir = cfg_.incident == Side::left ? Dir::right : Dir::left;
        const auto inc_u = static_cast<std::size_t>(inc_region);
        if (!allowed_[inc_u])
            throw ConfigError("incident region is classically forbidden at this energy");

        const double anchor = cfg_.incident == Side::left ? b : a;
        const cplx p = p_signed(inc_region, inc_dir);

        WaveSegment launch{};
        launch.t0 = 0.0;
        launch.x0 = anchor;
        launch.p = p;
        launch.r = 1.0;
        launch.s0 = std::real(p) * anchor;
        launch.E = E_;
        launch.mass = mass_;
        launch.hbar = hbar_;
        launch.order = 0;
        launch.behind_unbounded = cfg_.mode == RunMode::continuous;
        launch.tail_t0 = cfg_.mode == RunMode::wavepacket ? (b - a) / speed_[inc_u] : kInf;
        field_.component(inc_region, inc_dir).segments.push_back(launch);
        schedule_segment({inc_region, inc_dir}, 0);

        const int n = cfg_.launch_points;
        const double spacing = n > 1 ? (b - a) / (n - 1) : (b - a);
        for (int i = 0; i < n; ++i) {
            Trajectory tr{};
            tr.id = static_cast<long>(trajs_.size());
            tr.parent = -1;
            tr.comp = {inc_region, inc_dir};
            tr.order = 0;
            tr.t0 = 0.0;
            tr.x0 = n > 1 ? a + spacing * i : anchor;
            tr.p = p;
            tr.r = 1.0;
            tr.s0 = std::real(p) * tr.x0;
            tr.weight = spacing;
            tr.E = E_;
            tr.mass = mass_;
            trajs_.push_back(tr);
            schedule_trajectory(trajs_.back());
        }

        const double p_in = std::real(pmag_[inc_u]);
        const double f_left = allowed_[0] ? std::real(pmag_[0]) / p_in : 0.0;
        const auto last_u = static_cast<std::size_t>(nsteps_);
        const double f_right = allowed_[last_u] ? std::real(pmag_[last_u]) / p_in : 0.0;
        mon_left_ = Monitor(xL_, Dir::left, f_left, E_, hbar_);
        mon_right_ = Monitor(xR_, Dir::right, f_right, E_, hbar_);
        left_required_ = cfg_.incident == Side::left ? nsteps_ >= 1 : allowed_[0];
        right_required_ = cfg_.incident == Side::right ? nsteps_ >= 1 : allowed_[last_u];
    }

    void schedule_segment(ComponentId id, int seg_index) {
        const WaveSegment& seg =
            field_.component(id.region, id.dir).segments[static_cast<std::size_t>(seg_index)];
        const Target tg = next_target(id.region, id.dir);
        if (tg.what == Target::none)
            return;
        if (tg.what == Target::edge && seg.evanescent())
            return; // decays toward the open end; nothing ever arrives
        const int kind = tg.what == Target::step ? wave_step : wave_edge;
        const long subject = (static_cast<long>(component_key(id)) << 32) | static_cast<long>(seg_index);
        queue_.push({seg.front_time_at(tg.x), kind, tg.index, subject, seq_++});
        if (seg.tail_t0 < kInf)
            queue_.push({seg.tail_time_at(tg.x), kind, tg.index, subject, seq_++});
    }

    void schedule_trajectory(const Trajectory& tr) {
        if (tr.comp.region == nsteps_ && tr.comp.dir == Dir::right && std::imag(tr.p) > 0.0)
            return; // evanescent tail of the rightmost region: nothing downstream
        if (tr.comp.region == 0 && tr.comp.dir == Dir::left && std::imag(tr.p) < 0.0)
            return;
        const Target tg = next_target(tr.comp.region, tr.comp.dir);
        if (tg.what == Target::none)
            return;
        const double speed = speed_[static_cast<std::size_t>(tr.comp.region)];
        const double vsign = dir_sign(tr.comp.dir);
        const double t_arrive = tr.t0 + (tg.x - tr.x0) * vsign / speed;
        queue_.push({t_arrive, tg.what == Target::step ? traj_step : traj_edge, tg.index, tr.id, seq_++});
    }

    struct Incident {
        ComponentId id;
        const WaveSegment* seg;
        PolarValue val;
        cplx p_inc;
        cplx p_far;
    };

    /// Incident waves feeding step k at time t: left region moving right
    /// first, then right region moving left.
    std::array<std::optional<Incident>, 2> incident_at(int k, double t) const {
        std::array<std::optional<Incident>, 2> out;
        const double xk = pot_.step_position(k);
        const auto jl = static_cast<std::size_t>(k);
        const auto jr = jl + 1;
        if (const WaveSegment* seg = field_.component(k, Dir::right).covering(xk, t))
            out[0] = Incident{{k, Dir::right}, seg, seg->polar_at(xk, t), pmag_[jl],
                              wall_[jr] ? cplx{0.0, kInf} : pmag_[jr]};
        if (!wall_[jr])
            if (const WaveSegment* seg = field_.component(k + 1, Dir::left).covering(xk, t))
                out[1] = Incident{{k + 1, Dir::left}, seg, seg->polar_at(xk, t), pmag_[jr], pmag_[jl]};
        return out;
    }

    /// Recompute both outgoing waves at step k from whatever is incident on
    /// it, appending new segments where the value changed.
    void update_outgoing(int k, double t, bool from_wave) {
        const double xk = pot_.step_position(k);
        const auto incs = incident_at(k, t);

        std::vector<PolarValue> parts_left, parts_right;
        int order_left = 0, order_right = 0;
        for (const auto& inc : incs) {
            if (!inc)
                continue;
            const LocalSplit ls = split_at_step(inc->p_inc, inc->p_far, inc->val.r, inc->val.s, hbar_);
            log_split(t, k, *inc, ls, from_wave);
            const bool from_left = inc->id.dir == Dir::right;
            if (from_left) {
                parts_left.push_back({ls.r_refl, ls.s_refl});
                if (ls.has_trans)
                    parts_right.push_back({ls.r_trans, ls.s_trans});
            } else {
                parts_right.push_back({ls.r_refl, ls.s_refl});
                if (ls.has_trans)
                    parts_left.push_back({ls.r_trans, ls.s_trans});
            }
            const int next_order = inc->seg->order + 1;
            order_left = std::max(order_left, next_order);
            order_right = std::max(order_right, next_order);
        }

        emit_segment({k, Dir::left}, xk, t, merge_contributions(parts_left, hbar_), order_left);
        if (!wall_[static_cast<std::size_t>(k) + 1])
            emit_segment({k + 1, Dir::right}, xk, t, merge_contributions(parts_right, hbar_), order_right);
    }

    void emit_segment(ComponentId id, double xk, double t, PolarValue v, int order) {
        ComponentWave& comp = field_.component(id.region, id.dir);
        if (v.r == 0.0 && (comp.segments.empty() || comp.segments.back().r == 0.0))
            return; // still dark: nothing new to carry
        WaveSegment seg{};
        seg.t0 = t;
        seg.x0 = xk;
        seg.p = p_signed(id.region, id.dir);
        seg.r = v.r;
        seg.s0 = v.s;
        seg.E = E_;
        seg.mass = mass_;
        seg.hbar = hbar_;
        seg.order = order;
        comp.segments.push_back(seg);
        schedule_segment(id, static_cast<int>(comp.segments.size()) - 1);
    }

    void log_split(double t, int k, const Incident& inc, const LocalSplit& ls, bool from_wave) {
        SpawnSplit sp;
        sp.t = t;
        sp.step = k;
        sp.incident = inc.id;
        sp.p_inc = inc.p_inc;
        sp.p_trans = inc.p_far;
        sp.r_inc = inc.val.r;
        sp.s_inc = inc.val.s;
        sp.r_refl = ls.r_refl;
        sp.s_refl = ls.s_refl;
        sp.r_trans = ls.r_trans;
        sp.s_trans = ls.s_trans;
        sp.wall = std::isinf(std::imag(inc.p_far));
        sp.trans_allowed = ls.has_trans && std::real(inc.p_far) > 0.0;
        sp.from_wave = from_wave;
        splits_.push_back(sp);
    }

    void handle_wave_edge(const Event& ev) {
        if (frozen_)
            return; // still evolving the field for snapshots, no more readings
        const bool right_side = ev.where == 1;
        const int region = right_side ? nsteps_ : 0;
        const Dir dir = right_side ? Dir::right : Dir::left;
        const double x = right_side ? xR_ : xL_;
        Monitor& mon = right_side ? mon_right_ : mon_left_;
        if (const auto v = field_.component_polar(region, dir, x, ev.t))
            mon.on_wave(ev.t, v->r, v->s);
        else
            mon.on_wave(ev.t, 0.0, 0.0);
        check_convergence(ev.t);
    }

    void check_convergence(double t) {
        const int cycles = std::max(mon_left_.jumps_at_least(cfg_.tol),
                                    mon_right_.jumps_at_least(cfg_.tol));
        if (cycles > cfg_.max_cycles) {
            declare(t, false, false);
            return;
        }
        const std::array<MonitorRole, 2> roles{
            MonitorRole{&mon_left_, left_required_},
            MonitorRole{&mon_right_, right_required_},
        };
        if (converged(roles, cfg_.tol, cfg_.min_cycles, cycles))
            declare(t, true, false);
    }

    void declare(double t, bool ok, bool quiescent) {
        summary_.E = E_;
        summary_.t_final = t;
        summary_.converged = ok;
        summary_.cycles = std::max(mon_left_.jumps_at_least(cfg_.tol),
                                   mon_right_.jumps_at_least(cfg_.tol));
        if (quiescent) {
            summary_.error_bar = 0.0; // every edge has passed; the state is exact
        } else {
            double err = 0.0;
            if (left_required_ && !mon_left_.jumps().empty())
                err = std::max(err, mon_left_.last_dP());
            if (right_required_ && !mon_right_.jumps().empty())
                err = std::max(err, mon_right_.last_dP());
            summary_.error_bar = err;
        }
        frozen_ = true;
        horizon_ = t;
        for (double ts : cfg_.snapshot_times)
            horizon_ = std::max(horizon_, ts); // keep evolving the wave for late snapshots
    }

    void handle_traj_step(const Event& ev) {
        const int k = ev.where;
        const double t = ev.t;
        const double xk = pot_.step_position(k);

        // gather arrivals at this step that are synchronous within dt_sync
        std::vector<long> group{ev.subject};
        while (!queue_.empty()) {
            const Event& nx = queue_.top();
            if (nx.kind != traj_step || nx.where != k || nx.t - t > cfg_.dt_sync)
                break;
            group.push_back(nx.subject);
            events_.push_back({nx.t, nx.kind, nx.where, nx.subject});
            queue_.pop();
        }

        const auto jl = static_cast<std::size_t>(k);
        const auto jr = jl + 1;
        double w_left = 0.0, w_right = 0.0;
        for (long id : group) {
            Trajectory& tr = trajs_[static_cast<std::size_t>(id)];
            const double dist = xk - tr.x0;
            const double r_arr = tr.r * std::exp(-std::imag(tr.p) * dist / hbar_);
            const double s_arr = tr.s0 + std::real(tr.p) * dist - E_ * (t - tr.t0);
            const bool from_left = tr.comp.dir == Dir::right;
            const cplx p_inc = pmag_[from_left ? jl : jr];
            const cplx p_far = from_left ? (wall_[jr] ? cplx{0.0, kInf} : pmag_[jr]) : pmag_[jl];
            const LocalSplit ls = split_at_step(p_inc, p_far, r_arr, s_arr, hbar_);
            Incident inc{tr.comp, nullptr, {r_arr, s_arr}, p_inc, p_far};
            log_split(t, k, inc, ls, false);

            // weight moves with the flux shares
            const double denom = r_arr * r_arr * std::real(p_inc);
            if (denom > 0.0) {
                const double f_refl = ls.r_refl * ls.r_refl * std::real(p_inc) / denom;
                const double f_trans =
                    ls.has_trans ? ls.r_trans * ls.r_trans * std::real(p_far) / denom : 0.0;
                (from_left ? w_left : w_right) += tr.weight * f_refl;
                (from_left ? w_right : w_left) += tr.weight * f_trans;
            }
            tr.death_t = t;
            tr.death_x = cplx{xk, std::imag(tr.position(t))};
        }

        const long parent = group.front();
        spawn_child({k, Dir::left}, xk, t, parent, w_left);
        if (!wall_[jr])
            spawn_child({k + 1, Dir::right}, xk, t, parent, w_right);
    }

    void spawn_child(ComponentId id, double xk, double t, long parent, double weight) {
        const WaveSegment* seg = field_.component(id.region, id.dir).covering(xk, t);
        if (!seg)
            return; // that side has stayed dark
        Trajectory tr{};
        tr.id = static_cast<long>(trajs_.size());
        tr.parent = parent;
        tr.comp = id;
        tr.order = seg->order;
        tr.t0 = t;
        tr.x0 = xk;
        tr.p = seg->p;
        tr.r = seg->r;
        tr.s0 = seg->polar_at(xk, t).s;
        tr.weight = weight;
        tr.E = E_;
        tr.mass = mass_;
        trajs_.push_back(tr);
        schedule_trajectory(trajs_.back());
    }

    void handle_traj_edge(const Event& ev) {
        Trajectory& tr = trajs_[static_cast<std::size_t>(ev.subject)];
        const double x = ev.where == 1 ? xR_ : xL_;
        tr.death_t = ev.t;
        tr.death_x = cplx{x, 0.0};
        if (!frozen_)
            (ev.where == 1 ? mon_right_ : mon_left_).add_exit_weight(tr.weight);
    }

    RunResult assemble() {
        const bool packets = cfg_.mode == RunMode::wavepacket;
        const Monitor& near = cfg_.incident == Side::left ? mon_left_ : mon_right_;
        const Monitor& far = cfg_.incident == Side::left ? mon_right_ : mon_left_;
        summary_.P_refl = packets ? near.packet_probability() : near.latest_P();
        summary_.P_trans = packets ? far.packet_probability() : far.latest_P();

        RunResult out;
        out.summary = summary_;
        out.field = std::move(field_);
        out.monitor_left = std::move(mon_left_);
        out.monitor_right = std::move(mon_right_);
        out.trajectories = std::move(trajs_);
        out.splits = std::move(splits_);
        out.events = std::move(events_);
        return out;
    }

    SimulationConfig cfg_;
    PiecewisePotential pot_;
    int nsteps_ = 0;
    double E_ = 0.0, hbar_ = 1.0, mass_ = 1.0;
    double xL_ = 0.0, xR_ = 0.0;
    std::vector<cplx> pmag_;
    std::vector<double> speed_;
    std::vector<bool> wall_;
    std::vector<bool> allowed_;
    WaveField field_;
    Monitor mon_left_, mon_right_;
    bool left_required_ = true, right_required_ = true;
    std::vector<Trajectory> trajs_;
    std::vector<SpawnSplit> splits_;
    std::vector<EventRecord> events_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    long seq_ = 0;
    bool frozen_ = false;
    double horizon_ = 0.0;
    double last_wave_t_ = 0.0;
    ScatteringResult summary_;
};

/// Convenience wrapper: one full run for a ready-made configuration.
inline RunResult run_simulation(const SimulationConfig& cfg) {
    Engine engine(cfg);
    return engine.run();
}

} // namespace wavestep
