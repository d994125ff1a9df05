#include "sojourn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sojourn/errors.hpp"

namespace sojourn {

GridSpec GridSpec::with_step(double start, double end, double step) {
    if (!(end > start)) throw ConfigError("grid: end must exceed start");
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("grid: step must be positive");
    const double intervals = std::max(1.0, std::round((end - start) / step));
    GridSpec g{start, end, static_cast<std::size_t>(intervals) + 1};
    g.validate();
    return g;
}

std::size_t GridSpec::nearest(double t) const noexcept {
    const double k = std::round((t - start) / step());
    if (k <= 0.0) return 0;
    return std::min(n_points - 1, static_cast<std::size_t>(k));
}

void GridSpec::validate() const {
    if (!std::isfinite(start) || !std::isfinite(end)) throw ConfigError("grid: bounds must be finite");
    if (!(end > start)) throw ConfigError("grid: end must exceed start");
    if (n_points < 2) throw ConfigError("grid: n_points must be at least 2");
}

void Lattice2D::validate() const {
    axis1.validate();
    axis2.validate();
}

void SamplePath::validate() const {
    grid.validate();
    if (values.size() != grid.n_points)
        throw ConfigError("path: " + std::to_string(values.size()) + " values for " +
                          std::to_string(grid.n_points) + " grid points");
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
        throw ConfigError("path: non-finite value");
}

void Field2D::validate() const {
    lattice.validate();
    if (values.size() != lattice.size()) throw ConfigError("field: value count does not match lattice");
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
        throw ConfigError("field: non-finite value");
}

}  // namespace sojourn
