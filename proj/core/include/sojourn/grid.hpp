#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sojourn {

/// Uniform discretisation of [start, end] with n_points nodes (both ends included).
struct GridSpec {
    double start = 0.0;
    double end = 1.0;
    std::size_t n_points = 2;

    /// Grid on [start, end] whose step is as close to `step` as an integer node count allows.
    [[nodiscard]] static GridSpec with_step(double start, double end, double step);

    [[nodiscard]] double step() const noexcept { return (end - start) / static_cast<double>(n_points - 1); }
    [[nodiscard]] double length() const noexcept { return end - start; }
    [[nodiscard]] double at(std::size_t i) const noexcept { return start + step() * static_cast<double>(i); }
    /// Index of the node nearest to t (clamped to the grid).
    [[nodiscard]] std::size_t nearest(double t) const noexcept;

    /// Throws ConfigError unless end > start and n_points >= 2.
    void validate() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Lattice2D {
    GridSpec axis1;
    GridSpec axis2;

    [[nodiscard]] std::size_t size() const noexcept { return axis1.n_points * axis2.n_points; }
    [[nodiscard]] double cell_area() const noexcept { return axis1.step() * axis2.step(); }
    [[nodiscard]] double area() const noexcept { return axis1.length() * axis2.length(); }
    void validate() const;

    friend bool operator==(const Lattice2D&, const Lattice2D&) = default;
};

/// Process values on a GridSpec.
struct SamplePath {
    GridSpec grid;
    std::vector<double> values;

    [[nodiscard]] std::span<const double> view() const noexcept { return values; }
    /// Throws ConfigError on a length mismatch or a non-finite value.
    void validate() const;
};

/// Field values on a Lattice2D, row-major with axis1 as the slow index.
struct Field2D {
    Lattice2D lattice;
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t i, std::size_t j) const noexcept {
        return values[i * lattice.axis2.n_points + j];
    }
    [[nodiscard]] double& at(std::size_t i, std::size_t j) noexcept {
        return values[i * lattice.axis2.n_points + j];
    }
    [[nodiscard]] std::span<const double> view() const noexcept { return values; }
    void validate() const;
};

}  // namespace sojourn
