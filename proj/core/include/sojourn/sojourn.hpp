#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sojourn/grid.hpp"

namespace sojourn {

/// Level z_x at which a path's sojourn drops to x, or minus infinity when the
/// requested sojourn is at least the total measure. Minus infinity is a state,
/// never a floating-point value: exp() maps it to exactly 0.
class Level {
public:
    [[nodiscard]] static Level at(double z) noexcept { return Level(false, z); }
    [[nodiscard]] static Level minus_infinity() noexcept { return Level(true, 0.0); }

    [[nodiscard]] bool is_minus_infinity() const noexcept { return neg_inf_; }
    /// Only meaningful when finite.
    [[nodiscard]] double value() const noexcept { return z_; }
    [[nodiscard]] double exp() const noexcept;
    /// exp(z - shift), 0 for minus infinity.
    [[nodiscard]] double exp_shifted(double shift) const noexcept;

    friend bool operator==(const Level&, const Level&) = default;

private:
    Level(bool neg_inf, double z) noexcept : neg_inf_(neg_inf), z_(z) {}
    bool neg_inf_;
    double z_;
};

/// Lebesgue measure of {t : w(t) > level}: cell measure times the count of
/// values strictly above the level (left-point rule).
[[nodiscard]] double sojourn_time(std::span<const double> values, double cell_measure, double level) noexcept;
[[nodiscard]] double sojourn_time(const SamplePath& path, double level) noexcept;
[[nodiscard]] double sojourn_time(const Field2D& field, double level) noexcept;

[[nodiscard]] double supremum(std::span<const double> values) noexcept;
[[nodiscard]] double supremum(const SamplePath& path) noexcept;
[[nodiscard]] double supremum(const Field2D& field) noexcept;

/// Smallest count m such that cell_measure * m > x, evaluated in the same
/// floating-point arithmetic as sojourn_time.
[[nodiscard]] std::size_t required_count(double cell_measure, double x) noexcept;

/// Sorted (nonincreasing) copy of a path, answering sojourn queries in O(log n).
class SojournProfile {
public:
    SojournProfile(std::span<const double> values, double cell_measure);
    explicit SojournProfile(const SamplePath& path);
    explicit SojournProfile(const Field2D& field);

    [[nodiscard]] double cell_measure() const noexcept { return cell_; }
    [[nodiscard]] std::span<const double> sorted_values() const noexcept { return sorted_; }
    [[nodiscard]] double total_measure() const noexcept;
    /// cell_measure * #{values > z}.
    [[nodiscard]] double measure_above(double z) const noexcept;

private:
    double cell_;
    std::vector<double> sorted_;
};

/// z_x with the contract  sojourn(z) > x  <=>  z < z_x,  so that the Berman
/// integral  int I(sojourn(z) > x) e^z dz  equals exp(z_x) for the discretised path.
[[nodiscard]] Level level_for_sojourn(const SojournProfile& profile, double x) noexcept;

/// Same as above without building a profile; `scratch` is overwritten.
[[nodiscard]] Level level_for_sojourn(std::span<const double> values, double cell_measure, double x,
                                      std::vector<double>& scratch);

}  // namespace sojourn
