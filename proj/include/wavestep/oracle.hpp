#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "potential.hpp"
#include "waves.hpp"

namespace wavestep {

/// Matching amplitudes for a single step with a unit wave incident on it:
/// reflected amplitude on the incident side, transmitted amplitude on the
/// far side. Side-agnostic; pass the incident-side potential first.
struct StepCoefficients {
    cplx reflected{0.0, 0.0};
    cplx transmitted{0.0, 0.0};
};

inline StepCoefficients step_coefficients(double E, double V_inc, double V_far, double mass) {
    const cplx p = classical_momentum(E, V_inc, mass);
    const cplx q = classical_momentum(E, V_far, mass);
    if (std::isinf(std::imag(q)))
        return {cplx{-1.0, 0.0}, cplx{0.0, 0.0}};
    const cplx sum = p + q;
    if (std::abs(sum) < 1e-12 * (std::abs(p) + std::abs(q) + 1.0))
        throw DegenerateMomenta("vanishing momentum sum at step");
    return {(p - q) / sum, 2.0 * p / sum};
}

/// Exact stationary scattering state of a piecewise constant potential,
/// solved by matching value and slope at every step. Built independently of
/// the propagation engine so the two can be compared.
class ExactSolution {
public:
    cplx r{0.0, 0.0};
    cplx t{0.0, 0.0};
    double P_refl = 0.0;
    double P_trans = 0.0;

    /// Wave value at x; points exactly on a step use the left region.
    cplx psi(double x) const {
        int j = static_cast<int>(steps_.size());
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            if (x <= steps_[k]) {
                j = static_cast<int>(k);
                break;
            }
        }
        const auto ju = static_cast<std::size_t>(j);
        if (ju >= cplus_.size()) // hard wall region
            return {0.0, 0.0};
        const cplx ip = cplx{0.0, 1.0} * p_[ju] / hbar_;
        return cplus_[ju] * std::exp(ip * x) + cminus_[ju] * std::exp(-ip * x);
    }

    cplx coeff_forward(int region) const { return cplus_[static_cast<std::size_t>(region)]; }
    cplx coeff_backward(int region) const { return cminus_[static_cast<std::size_t>(region)]; }
    cplx momentum(int region) const { return p_[static_cast<std::size_t>(region)]; }

    friend ExactSolution solve_exact(const PiecewisePotential& pot, double E, Side incident);

private:
    std::vector<double> steps_;
    std::vector<cplx> p_;
    std::vector<cplx> cplus_, cminus_;
    double hbar_ = 1.0;
    bool wall_last_ = false;
};

namespace detail {

/// Value and slope of c+ e^{ipx/h} + c- e^{-ipx/h} at x.
inline std::pair<cplx, cplx> psi_and_slope(cplx cp, cplx cm, cplx p, double x, double hbar) {
    const cplx ip = cplx{0.0, 1.0} * p / hbar;
    const cplx e = std::exp(ip * x);
    return {cp * e + cm / e, ip * (cp * e - cm / e)};
}

/// Coefficients in a region of momentum p reproducing the given value and
/// slope at x.
inline std::pair<cplx, cplx> match_from(cplx psi, cplx slope, cplx p, double x, double hbar) {
    const cplx ip = cplx{0.0, 1.0} * p / hbar;
    const cplx e = std::exp(ip * x);
    return {(psi + slope / ip) / (2.0 * e), (psi - slope / ip) * e / 2.0};
}

} // namespace detail

inline ExactSolution solve_exact(const PiecewisePotential& pot, double E, Side incident = Side::left) {
    const int l = pot.step_count();
    const int nwave = pot.wall(pot.region_count() - 1) ? l : l + 1;
    if (nwave < 1)
        throw ConfigError("hard wall requires at least one step");

    ExactSolution sol;
    sol.steps_ = pot.steps();
    sol.hbar_ = pot.hbar();
    sol.wall_last_ = pot.wall(pot.region_count() - 1);
    sol.p_.resize(static_cast<std::size_t>(nwave));
    for (int j = 0; j < nwave; ++j)
        sol.p_[static_cast<std::size_t>(j)] = pot.region_momentum(E, j);

    std::vector<cplx> cp(static_cast<std::size_t>(nwave)), cm(static_cast<std::size_t>(nwave));
    const double hbar = pot.hbar();

    if (incident == Side::left) {
        // wave arriving from the left region
        if (std::real(sol.p_[0]) == 0.0)
            throw ConfigError("incident region is classically forbidden at this energy");
        const auto last = static_cast<std::size_t>(nwave - 1);
        if (sol.wall_last_) {
            // vanish at the wall position
            const cplx ip = cplx{0.0, 1.0} * sol.p_[last] / hbar;
            const double xw = pot.step_position(l - 1);
            cp[last] = std::exp(-ip * xw);
            cm[last] = -std::exp(ip * xw);
        } else {
            cp[last] = 1.0;
            cm[last] = 0.0;
        }
        for (int k = nwave - 2; k >= 0; --k) {
            const auto ku = static_cast<std::size_t>(k);
            const double xk = pot.step_position(k);
            auto [v, d] = detail::psi_and_slope(cp[ku + 1], cm[ku + 1], sol.p_[ku + 1], xk, hbar);
            std::tie(cp[ku], cm[ku]) = detail::match_from(v, d, sol.p_[ku], xk, hbar);
        }
        const cplx A = cp[0];
        if (std::abs(A) < 1e-12)
            throw SingularMatching("incident amplitude came out negligible");
        for (std::size_t j = 0; j < cp.size(); ++j) {
            cp[j] /= A;
            cm[j] /= A;
        }
        sol.r = cm[0];
        sol.t = sol.wall_last_ ? cplx{0.0, 0.0} : cp[static_cast<std::size_t>(nwave - 1)];
        sol.P_refl = std::norm(sol.r);
        const cplx pl = sol.p_[static_cast<std::size_t>(nwave - 1)];
        sol.P_trans = sol.wall_last_ || std::real(pl) == 0.0
                          ? 0.0
                          : std::real(pl) / std::real(sol.p_[0]) * std::norm(sol.t);
    } else {
        // wave arriving from the right region
        if (sol.wall_last_)
            throw ConfigError("no incident channel behind a hard wall");
        const auto last = static_cast<std::size_t>(nwave - 1);
        if (std::real(sol.p_[last]) == 0.0)
            throw ConfigError("incident region is classically forbidden at this energy");
        cp[0] = 0.0;
        cm[0] = 1.0;
        for (int k = 0; k + 1 < nwave; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const double xk = pot.step_position(k);
            auto [v, d] = detail::psi_and_slope(cp[ku], cm[ku], sol.p_[ku], xk, hbar);
            std::tie(cp[ku + 1], cm[ku + 1]) = detail::match_from(v, d, sol.p_[ku + 1], xk, hbar);
        }
        const cplx A = cm[last];
        if (std::abs(A) < 1e-12)
            throw SingularMatching("incident amplitude came out negligible");
        for (std::size_t j = 0; j < cp.size(); ++j) {
            cp[j] /= A;
            cm[j] /= A;
        }
        sol.r = cp[last];
        sol.t = cm[0];
        sol.P_refl = std::norm(sol.r);
        sol.P_trans = std::real(sol.p_[0]) == 0.0
                          ? 0.0
                          : std::real(sol.p_[0]) / std::real(sol.p_[last]) * std::norm(sol.t);
    }

    sol.cplus_ = std::move(cp);
    sol.cminus_ = std::move(cm);
    return sol;
}

/// Closed-form transmission probability of a single rectangular barrier or
/// well of height V0 and width w between zero-potential outer regions.
inline double barrier_transmission(double E, double V0, double w, double mass, double hbar) {
    if (E <= 0.0)
        return 0.0;
    if (E > V0) {
        const double k2 = std::sqrt(2.0 * mass * (E - V0)) / hbar;
        const double s = std::sin(k2 * w);
        return 1.0 / (1.0 + V0 * V0 * s * s / (4.0 * E * (E - V0)));
    }
    const double kap = std::sqrt(2.0 * mass * (V0 - E)) / hbar;
    const double sh = std::sinh(kap * w);
    return 1.0 / (1.0 + V0 * V0 * sh * sh / (4.0 * E * (V0 - E)));
}

/// Closed-form probabilities for a single step of height V0.
inline std::pair<double, double> step_probabilities(double E, double V0, double mass) {
    if (E <= V0)
        return {1.0, 0.0};
    const double k1 = std::sqrt(2.0 * mass * E);
    const double k2 = std::sqrt(2.0 * mass * (E - V0));
    const double R = (k1 - k2) / (k1 + k2);
    return {R * R, 1.0 - R * R};
}

/// Energies in [Emin, Emax] at which a rectangular barrier or well of
/// height V0 and width w is perfectly transparent: interior half-wavelengths
/// fitting the width exactly.
inline std::vector<double> barrier_resonances(double V0, double w, double mass, double hbar,
                                              double Emin, double Emax) {
    std::vector<double> out;
    const double pi = std::acos(-1.0);
    for (int n = 1;; ++n) {
        const double q = n * pi * hbar / w;
        const double En = V0 + q * q / (2.0 * mass);
        if (En > Emax)
            break;
        if (En >= Emin && En > 0.0)
            out.push_back(En);
    }
    return out;
}

/// Exact momentum profile of the counter-propagating decomposition for a
/// semi-infinite tunneling step at the origin, 0 < E < V0. Constant at
/// sqrt(2mE) on the allowed side and decaying beyond; continuous at x = 0.
inline double tunneling_momentum(double x, double E, double V0, double mass, double hbar) {
    const double k = std::sqrt(2.0 * mass * E) / hbar;
    if (x <= 0.0)
        return hbar * k;
    const double kap = std::sqrt(2.0 * mass * (V0 - E)) / hbar;
    const double delta = std::atan2(kap, k);
    const double u = std::exp(-2.0 * kap * x); // scaled to stay finite for large x
    return hbar * kap * 2.0 * u * std::sin(2.0 * delta) /
           (u * u + 1.0 - 2.0 * u * std::cos(2.0 * delta));
}

/// Action, its slope, and the amplitude of the decomposition of a standing
/// wave against a hard wall at the origin, for modulus parameters (F, B).
/// Valid for x < 0; the branch is continued so s is smooth and increasing.
struct HardwallAction {
    double s = 0.0;
    double ds_dx = 0.0;
    double r = 0.0;
};

inline HardwallAction hardwall_action(double x, double k, double F, double B,
                                      double mass, double hbar) {
    const double pi = std::acos(-1.0);
    const double c = std::cos(k * x) / std::sin(k * x);
    const double G = mass * F / hbar * (-c / k + B);
    const double s = hbar * (std::atan2(1.0, -G) + pi * std::floor(k * x / pi));
    double slope;
    if (std::abs(c) > 1e120) {
        slope = hbar * hbar * k * k / (mass * F);
    } else {
        slope = mass * F * (1.0 + c * c) / (1.0 + G * G);
    }
    return {s, slope, std::sqrt(mass * F / slope)};
}

} // namespace wavestep
