#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "potential.hpp"

namespace wavestep {

enum class Dir : int { right = 0, left = 1 };

/// Which side of the scattering region a wave comes from or leaves by.
enum class Side : int { left = 0, right = 1 };

inline double dir_sign(Dir d) { return d == Dir::right ? 1.0 : -1.0; }
inline Dir opposite(Dir d) { return d == Dir::right ? Dir::left : Dir::right; }

/// One counter-propagating component: a travelling direction within a region.
struct ComponentId {
    int region = 0;
    Dir dir = Dir::right;

    friend bool operator==(ComponentId a, ComponentId b) {
        return a.region == b.region && a.dir == b.dir;
    }
};

inline int component_key(ComponentId id) {
    return 2 * id.region + (id.dir == Dir::left ? 1 : 0);
}

/// Amplitude and unwrapped action phase of a plane wave at one point.
struct PolarValue {
    double r = 0.0;
    double s = 0.0;
};

/// One plane-wave stretch of a component. Segments are appended as
/// successive corrections arrive at the region boundaries; behind a younger
/// leading edge the younger segment supersedes the older one, which is what
/// carries the travelling discontinuities of the exact solution.
struct WaveSegment {
    double t0 = 0.0;   // birth time
    double x0 = 0.0;   // birth anchor
    cplx p{0.0, 0.0};  // signed momentum; imaginary on evanescent stretches
    double r = 0.0;    // amplitude at the anchor
    double s0 = 0.0;   // action phase at (x0, t0), kept unwrapped
    double E = 0.0;
    double mass = 1.0;
    double hbar = 1.0;
    int order = 0;     // spawn generation, 0 for the launch wave
    bool behind_unbounded = false; // steady feed extends past the anchor
    double tail_t0 = kInf;         // trailing edge passes x0 at this time

    bool evanescent() const { return std::imag(p) != 0.0; }
    double speed() const { return std::abs(p) / mass; }
    double vsign() const {
        const double c = evanescent() ? std::imag(p) : std::real(p);
        return c >= 0.0 ? 1.0 : -1.0;
    }

    /// Instant the leading edge passes x. The event scheduler uses this same
    /// expression, so coverage tests agree bit for bit with event times.
    double front_time_at(double x) const {
        return t0 + (x - x0) * vsign() / speed();
    }
    double tail_time_at(double x) const {
        return tail_t0 + (x - x0) * vsign() / speed();
    }

    bool covers(double x, double t) const {
        const double downstream = (x - x0) * vsign();
        if (evanescent())
            return t >= t0 && downstream >= 0.0;
        // a finite-train segment is delimited by its front and tail times
        // alone; its body extends behind the anchor until the tail passes
        if (downstream < 0.0 && !behind_unbounded && tail_t0 == kInf)
            return false;
        if (t < front_time_at(x))
            return false;
        if (tail_t0 < kInf && t >= tail_time_at(x))
            return false;
        return true;
    }

    /// Amplitude and phase at (x, t). On travelling stretches the amplitude
    /// is constant; on evanescent ones it decays away from the anchor while
    /// the spatial phase stays flat.
    PolarValue polar_at(double x, double t) const {
        const double damp = std::exp(-std::imag(p) * (x - x0) / hbar);
        const double s = s0 + std::real(p) * (x - x0) - E * (t - t0);
        return {r * damp, s};
    }

    cplx value_at(double x, double t) const {
        const PolarValue v = polar_at(x, t);
        return std::polar(v.r, v.s / hbar);
    }
};

/// All segments of one component, oldest first.
struct ComponentWave {
    ComponentId id;
    std::vector<WaveSegment> segments;

    const WaveSegment* covering(double x, double t) const {
        for (auto it = segments.rbegin(); it != segments.rend(); ++it)
            if (it->covers(x, t))
                return &*it;
        return nullptr;
    }
};

/// Value of one component at a point; raises if the component has not
/// reached it yet.
inline cplx sample_wave(const ComponentWave& c, double x, double t) {
    const WaveSegment* seg = c.covering(x, t);
    if (!seg)
        throw AheadOfWavefront("component has no wave at the sampled point");
    return seg->value_at(x, t);
}

/// Probability flux carried by a plane wave of amplitude r and signed
/// momentum p.
inline double flux(cplx p_signed, double r, double mass) {
    return std::real(p_signed) / mass * r * r;
}

/// Combine same-momentum contributions (r_i, s_i) into a single amplitude
/// and unwrapped phase. The result is anchored to the largest contribution
/// so a dominant wave keeps its phase history; a single contribution passes
/// through untouched.
inline PolarValue merge_contributions(const std::vector<PolarValue>& parts, double hbar) {
    if (parts.empty())
        return {0.0, 0.0};
    if (parts.size() == 1)
        return parts.front();
    std::size_t dom = 0;
    for (std::size_t i = 1; i < parts.size(); ++i)
        if (parts[i].r > parts[dom].r)
            dom = i;
    const double s_ref = parts[dom].s;
    cplx z{0.0, 0.0};
    for (const PolarValue& c : parts)
        z += std::polar(c.r, (c.s - s_ref) / hbar);
    const double r = std::abs(z);
    if (r == 0.0)
        return {0.0, s_ref};
    return {r, s_ref + hbar * std::atan2(std::imag(z), std::real(z))};
}

/// Both components of every region, plus the region layout needed to decide
/// which pair a point belongs to.
class WaveField {
public:
    WaveField() = default;

    explicit WaveField(const PiecewisePotential& pot) : steps_(pot.steps()) {
        comps_.resize(2 * static_cast<std::size_t>(pot.region_count()));
        for (int j = 0; j < pot.region_count(); ++j) {
            comps_[static_cast<std::size_t>(component_key({j, Dir::right}))].id = {j, Dir::right};
            comps_[static_cast<std::size_t>(component_key({j, Dir::left}))].id = {j, Dir::left};
        }
    }

    ComponentWave& component(int region, Dir d) {
        return comps_[static_cast<std::size_t>(component_key({region, d}))];
    }
    const ComponentWave& component(int region, Dir d) const {
        return comps_[static_cast<std::size_t>(component_key({region, d}))];
    }

    int region_count() const { return static_cast<int>(comps_.size() / 2); }

    cplx component_value(int region, Dir d, double x, double t) const {
        const WaveSegment* seg = component(region, d).covering(x, t);
        return seg ? seg->value_at(x, t) : cplx{0.0, 0.0};
    }

    std::optional<PolarValue> component_polar(int region, Dir d, double x, double t) const {
        const WaveSegment* seg = component(region, d).covering(x, t);
        if (!seg)
            return std::nullopt;
        return seg->polar_at(x, t);
    }

    /// Total wave at (x, t): the sum of both components of the region that
    /// holds x. Points exactly on a step evaluate the region to the left.
    cplx superpose(double x, double t) const {
        int region = region_count() - 1;
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            if (x <= steps_[k]) {
                region = static_cast<int>(k);
                break;
            }
        }
        return component_value(region, Dir::right, x, t) +
               component_value(region, Dir::left, x, t);
    }

private:
    std::vector<double> steps_;
    std::vector<ComponentWave> comps_;
};

/// One member of the trajectory ensemble. Motion is uniform between events;
/// evanescent stretches advance along the imaginary axis from a real anchor.
struct Trajectory {
    long id = -1;
    long parent = -1;
    ComponentId comp;
    int order = 0;
    double t0 = 0.0;
    double x0 = 0.0;  // real birth anchor
    cplx p{0.0, 0.0}; // signed momentum
    double r = 0.0;
    double s0 = 0.0;
    double weight = 0.0;
    double death_t = kInf;
    cplx death_x{0.0, 0.0};
    double E = 0.0;
    double mass = 1.0;

    cplx position(double t) const { return cplx{x0, 0.0} + p / mass * (t - t0); }

    /// Action accumulated along the path: the spatial gain cancels against
    /// the energy drift except on travelling stretches.
    double s_at(double t) const {
        const double pr = std::real(p);
        return s0 + (pr * pr / mass - E) * (t - t0);
    }

    bool alive_at(double t) const { return t >= t0 && t < death_t; }
};

} // namespace wavestep
