#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dissipate/operator_spec.hpp"

namespace dissipate {

/// Tensor grid of interior nodes on a box. Node k along an axis sits at lo + (k + 1) h with
/// h = (hi - lo) / (N + 1); boundary nodes carry implicit zeros. Linear order is
/// lexicographic with x1 varying fastest.
class Grid {
public:
    Grid() = default;
    Grid(std::vector<Interval> box, std::vector<int> counts);

    static Grid from_spec(const OperatorSpec& spec);

    int dim() const noexcept { return static_cast<int>(counts_.size()); }
    int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
    const Interval& interval(int axis) const { return box_[static_cast<std::size_t>(axis)]; }
    const std::vector<Interval>& box() const noexcept { return box_; }
    const std::vector<int>& counts() const noexcept { return counts_; }

    std::size_t size() const noexcept { return size_; }
    std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    /// Quadrature weight of one node, the product of spacings.
    double weight() const noexcept { return weight_; }

    /// Per-axis index of a linear node index.
    void multi_index(std::size_t idx, std::span<int> out) const;
    std::size_t linear_index(std::span<const int> multi) const;

    /// Coordinates of a node; `multi` entries may be -1 or N (boundary nodes).
    void coordinates(std::span<const int> multi, std::span<double> out) const;
    std::vector<double> node(std::size_t idx) const;

    /// Coordinate along one axis of (possibly fractional) node position k.
    double coordinate(int axis, double k) const {
        return box_[static_cast<std::size_t>(axis)].lo + (k + 1.0) * h_[static_cast<std::size_t>(axis)];
    }

    bool operator==(const Grid& other) const;

private:
    std::vector<Interval> box_;
    std::vector<int> counts_;
    std::vector<double> h_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    double weight_ = 0.0;
};

/// Complex values at the interior nodes of a grid.
struct GridFunction {
    Grid grid;
    std::vector<Complex> values;

    GridFunction() = default;
    explicit GridFunction(Grid g) : grid(std::move(g)), values(grid.size()) {}

    static GridFunction from_function(const Grid& g, const std::function<Complex(std::span<const double>)>& f);

    std::size_t size() const noexcept { return values.size(); }
    Complex& operator[](std::size_t i) { return values[i]; }
    const Complex& operator[](std::size_t i) const { return values[i]; }

    double max_abs() const noexcept;
    /// Discrete L^2 norm with the node weight.
    double l2_norm() const noexcept;
    GridFunction& scale(double c) noexcept;
};

/// Coefficients sampled at every interior node, in grid order.
struct SampledCoefficients {
    Grid grid;
    std::vector<CoefficientSample> nodes;
};

SampledCoefficients sample_on_grid(const OperatorSpec& spec, const Grid& grid);

}  // namespace dissipate
