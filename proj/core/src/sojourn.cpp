#include "sojourn/sojourn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sojourn/errors.hpp"

namespace sojourn {

double Level::exp() const noexcept { return neg_inf_ ? 0.0 : std::exp(z_); }

double Level::exp_shifted(double shift) const noexcept { return neg_inf_ ? 0.0 : std::exp(z_ - shift); }

double sojourn_time(std::span<const double> values, double cell_measure, double level) noexcept {
    const auto count = std::count_if(values.begin(), values.end(), [level](double v) { return v > level; });
    return cell_measure * static_cast<double>(count);
}

double sojourn_time(const SamplePath& path, double level) noexcept {
    return sojourn_time(path.view(), path.grid.step(), level);
}

double sojourn_time(const Field2D& field, double level) noexcept {
    return sojourn_time(field.view(), field.lattice.cell_area(), level);
}

double supremum(std::span<const double> values) noexcept {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    return *std::max_element(values.begin(), values.end());
}

double supremum(const SamplePath& path) noexcept { return supremum(path.view()); }
double supremum(const Field2D& field) noexcept { return supremum(field.view()); }

std::size_t required_count(double cell_measure, double x) noexcept {
    const double ratio = std::floor(x / cell_measure);
    if (!(ratio < 9.0e15)) return std::numeric_limits<std::size_t>::max();
    std::size_t m = static_cast<std::size_t>(std::max(0.0, ratio)) + 1;
    while (m > 1 && cell_measure * static_cast<double>(m - 1) > x) --m;
    while (!(cell_measure * static_cast<double>(m) > x)) ++m;
    return m;
}

SojournProfile::SojournProfile(std::span<const double> values, double cell_measure)
    : cell_(cell_measure), sorted_(values.begin(), values.end()) {
    if (!(cell_measure > 0.0)) throw ConfigError("sojourn profile: cell measure must be positive");
    std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
}

SojournProfile::SojournProfile(const SamplePath& path) : SojournProfile(path.view(), path.grid.step()) {}

SojournProfile::SojournProfile(const Field2D& field) : SojournProfile(field.view(), field.lattice.cell_area()) {}

double SojournProfile::total_measure() const noexcept { return cell_ * static_cast<double>(sorted_.size()); }

double SojournProfile::measure_above(double z) const noexcept {
    // First element that is not > z in a nonincreasing sequence.
    const auto it = std::partition_point(sorted_.begin(), sorted_.end(), [z](double v) { return v > z; });
    return cell_ * static_cast<double>(it - sorted_.begin());
}

Level level_for_sojourn(const SojournProfile& profile, double x) noexcept {
    const std::size_t m = required_count(profile.cell_measure(), x);
    const auto values = profile.sorted_values();
    if (m > values.size()) return Level::minus_infinity();
    return Level::at(values[m - 1]);
}

Level level_for_sojourn(std::span<const double> values, double cell_measure, double x, std::vector<double>& scratch) {
    if (!(x >= 0.0)) throw ConfigError("level_for_sojourn: x must be >= 0");
    const std::size_t m = required_count(cell_measure, x);
    if (m > values.size()) return Level::minus_infinity();
    if (m == 1) return Level::at(supremum(values));
    scratch.assign(values.begin(), values.end());
    const auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(m - 1);
    std::nth_element(scratch.begin(), nth, scratch.end(), std::greater<>());
    return Level::at(*nth);
}

}  // namespace sojourn
