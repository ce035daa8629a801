#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "observe.hpp"

namespace wavestep {

/// Shortest round-trip decimal form, locale independent.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

/// Oracle values attached to a result row.
struct OracleColumns {
    double P_refl = 0.0;
    double P_trans = 0.0;
};

inline void write_result_header(std::ostream& os, bool with_oracle) {
    os << "# E[Eh]\tP_refl[1]\tP_trans[1]\terror_bar[1]\tcycles[1]\tt_final[a.u.]\tconverged[1]";
    if (with_oracle)
        os << "\toracle_P_refl[1]\toracle_P_trans[1]\tdelta_P_trans[1]";
    os << "\n";
}

inline void write_result_row(std::ostream& os, const ScatteringResult& r,
                             const std::optional<OracleColumns>& oracle) {
    os << format_number(r.E) << '\t' << format_number(r.P_refl) << '\t'
       << format_number(r.P_trans) << '\t' << format_number(r.error_bar) << '\t' << r.cycles
       << '\t' << format_number(r.t_final) << '\t' << (r.converged ? 1 : 0);
    if (oracle) {
        os << '\t' << format_number(oracle->P_refl) << '\t' << format_number(oracle->P_trans)
           << '\t' << format_number(std::abs(r.P_trans - oracle->P_trans));
    }
    os << "\n";
}

inline void write_psi_table(std::ostream& os, std::span<const double> xs,
                            std::span<const cplx> psi) {
    os << "# x[a0]\tre_psi[1]\tim_psi[1]\tabs2_psi[1]\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        os << format_number(xs[i]) << '\t' << format_number(std::real(psi[i])) << '\t'
           << format_number(std::imag(psi[i])) << '\t' << format_number(std::norm(psi[i])) << "\n";
    }
}

inline void write_snapshot_table(std::ostream& os, const WaveField& field,
                                 std::span<const double> times, std::span<const double> xs) {
    os << "# t[a.u.]\tx[a0]\tre_psi[1]\tim_psi[1]\tabs2_psi[1]\n";
    for (double t : times) {
        for (double x : xs) {
            const cplx v = field.superpose(x, t);
            os << format_number(t) << '\t' << format_number(x) << '\t'
               << format_number(std::real(v)) << '\t' << format_number(std::imag(v)) << '\t'
               << format_number(std::norm(v)) << "\n";
        }
    }
}

/// Two vertex rows per trajectory: birth and death, the latter clamped to
/// t_final for members still in flight when the run settled.
inline void write_trajectory_table(std::ostream& os, std::span<const Trajectory> trajs,
                                   double t_final) {
    os << "# id[1]\tparent[1]\tregion[1]\tdir[1]\tvertex[1]\tt[a.u.]\tx_re[a0]\tx_im[a0]\tr[1]\ts[a.u.]\tweight[1]\n";
    for (const Trajectory& tr : trajs) {
        if (tr.t0 > t_final)
            continue; // spawned while evolving past the reported end
        const double t_end = std::min(tr.death_t, t_final);
        const cplx x_end = tr.death_t <= t_final ? tr.death_x : tr.position(t_end);
        const char dir = tr.comp.dir == Dir::right ? 'R' : 'L';
        os << tr.id << '\t' << tr.parent << '\t' << tr.comp.region << '\t' << dir << "\t0\t"
           << format_number(tr.t0) << '\t' << format_number(tr.x0) << '\t' << format_number(0.0)
           << '\t' << format_number(tr.r) << '\t' << format_number(tr.s0) << '\t'
           << format_number(tr.weight) << "\n";
        os << tr.id << '\t' << tr.parent << '\t' << tr.comp.region << '\t' << dir << "\t1\t"
           << format_number(t_end) << '\t' << format_number(std::real(x_end)) << '\t'
           << format_number(std::imag(x_end)) << '\t' << format_number(tr.r) << '\t'
           << format_number(tr.s_at(t_end)) << '\t' << format_number(tr.weight) << "\n";
    }
}

/// Evenly spaced sample points across the observation window, both ends
/// included.
inline std::vector<double> plot_grid(double x_left, double x_right, int n) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xs.push_back(x_left + (x_right - x_left) * i / (n - 1));
    return xs;
}

} // namespace wavestep
