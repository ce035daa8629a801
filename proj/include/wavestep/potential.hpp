#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace wavestep {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Relative margin around a region value inside which an energy counts as
/// degenerate with it.
inline constexpr double kEnergyEdgeGuard = 1e-12;

/// Classical momentum magnitude sqrt(2 m (E - V)) for motion at total energy
/// E over a region of constant potential V. Above the region value the result
/// is positive real; below it, positive imaginary (an evanescent stretch).
/// V = +inf marks a hard wall and yields an infinite imaginary momentum that
/// only the splitting rules inspect.
inline cplx classical_momentum(double E, double V, double mass) {
    if (std::isinf(V) && V > 0.0)
        return {0.0, kInf};
    const double scale = std::max({1.0, std::abs(E), std::abs(V)});
    if (std::abs(E - V) < kEnergyEdgeGuard * scale)
        throw EnergyAtStepEdge("energy " + std::to_string(E) +
                               " coincides with region value " + std::to_string(V));
    const double q = 2.0 * mass * (E - V);
    return q > 0.0 ? cplx{std::sqrt(q), 0.0} : cplx{0.0, std::sqrt(-q)};
}

/// Piecewise constant potential on the line: l step positions separating
/// l + 1 region values. Region j spans (step[j-1], step[j]), with the outer
/// regions extending to -inf and +inf.
class PiecewisePotential {
public:
    PiecewisePotential(std::vector<double> steps, std::vector<double> values,
                       double mass, double hbar = 1.0)
        : steps_(std::move(steps)), values_(std::move(values)), mass_(mass), hbar_(hbar) {
        if (values_.empty() || steps_.size() + 1 != values_.size())
            throw SizeMismatch("need exactly one region value per region: got " +
                               std::to_string(steps_.size()) + " steps and " +
                               std::to_string(values_.size()) + " values");
        for (std::size_t k = 1; k < steps_.size(); ++k)
            if (!(steps_[k] > steps_[k - 1]))
                throw NonMonotonicSteps("step positions must be strictly increasing");
        for (std::size_t j = 0; j < values_.size(); ++j) {
            if (std::isnan(values_[j]) || (std::isinf(values_[j]) && values_[j] < 0.0))
                throw InfiniteInteriorRegion("region value must be finite or +inf");
            if (std::isinf(values_[j]) && j + 1 != values_.size())
                throw InfiniteInteriorRegion("a hard wall is allowed only in the rightmost region");
        }
        if (!(mass_ > 0.0) || !(hbar_ > 0.0))
            throw ConfigError("mass and hbar must be positive");
    }

    int step_count() const { return static_cast<int>(steps_.size()); }
    int region_count() const { return static_cast<int>(values_.size()); }

    double step_position(int k) const { return steps_[static_cast<std::size_t>(k)]; }
    double region_value(int j) const { return values_[static_cast<std::size_t>(j)]; }
    bool wall(int j) const { return std::isinf(values_[static_cast<std::size_t>(j)]); }

    double mass() const { return mass_; }
    double hbar() const { return hbar_; }

    /// Width of region j; the outer regions are half-infinite.
    double region_width(int j) const {
        if (j <= 0 || j >= step_count())
            return kInf;
        return steps_[static_cast<std::size_t>(j)] - steps_[static_cast<std::size_t>(j) - 1];
    }

    double left_bound(int j) const { return j == 0 ? -kInf : steps_[static_cast<std::size_t>(j) - 1]; }
    double right_bound(int j) const { return j == step_count() ? kInf : steps_[static_cast<std::size_t>(j)]; }

    /// Which region holds x. A point exactly on a step reports the step
    /// index instead of a region.
    struct Location {
        bool on_step;
        int index;
    };

    Location region_of(double x) const {
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            if (x == steps_[k])
                return {true, static_cast<int>(k)};
            if (x < steps_[k])
                return {false, static_cast<int>(k)};
        }
        return {false, step_count()};
    }

    /// Momentum magnitude in region j at total energy E.
    cplx region_momentum(double E, int j) const {
        return classical_momentum(E, region_value(j), mass_);
    }

    const std::vector<double>& steps() const { return steps_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> steps_;
    std::vector<double> values_;
    double mass_;
    double hbar_;
};

} // namespace wavestep
