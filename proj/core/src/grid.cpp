#include "dissipate/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace dissipate {

Grid::Grid(std::vector<Interval> box, std::vector<int> counts) : box_(std::move(box)), counts_(std::move(counts)) {
    if (box_.size() != counts_.size() || box_.empty()) throw std::invalid_argument("grid: box and counts disagree");
    size_ = 1;
    weight_ = 1.0;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        if (counts_[k] < 1) throw std::invalid_argument("grid: node counts must be positive");
        if (!(box_[k].hi > box_[k].lo)) throw std::invalid_argument("grid: degenerate interval");
        strides_.push_back(size_);
        size_ *= static_cast<std::size_t>(counts_[k]);
        h_.push_back(box_[k].length() / (counts_[k] + 1));
        weight_ *= h_.back();
    }
}

Grid Grid::from_spec(const OperatorSpec& spec) { return Grid(spec.domain, spec.grid); }

void Grid::multi_index(std::size_t idx, std::span<int> out) const {
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        out[k] = static_cast<int>(idx % static_cast<std::size_t>(counts_[k]));
        idx /= static_cast<std::size_t>(counts_[k]);
    }
}

std::size_t Grid::linear_index(std::span<const int> multi) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < counts_.size(); ++k) idx += static_cast<std::size_t>(multi[k]) * strides_[k];
    return idx;
}

void Grid::coordinates(std::span<const int> multi, std::span<double> out) const {
    for (std::size_t k = 0; k < counts_.size(); ++k) out[k] = box_[k].lo + (multi[k] + 1) * h_[k];
}

std::vector<double> Grid::node(std::size_t idx) const {
    std::vector<int> m(counts_.size());
    multi_index(idx, m);
    std::vector<double> x(counts_.size());
    coordinates(m, x);
    return x;
}

bool Grid::operator==(const Grid& other) const {
    if (counts_ != other.counts_) return false;
    for (std::size_t k = 0; k < box_.size(); ++k)
        if (box_[k].lo != other.box_[k].lo || box_[k].hi != other.box_[k].hi) return false;
    return true;
}

GridFunction GridFunction::from_function(const Grid& g, const std::function<Complex(std::span<const double>)>& f) {
    GridFunction u(g);
    for (std::size_t i = 0; i < g.size(); ++i) u.values[i] = f(g.node(i));
    return u;
}

double GridFunction::max_abs() const noexcept {
    double m = 0.0;
    for (const Complex& z : values) m = std::max(m, std::abs(z));
    return m;
}

double GridFunction::l2_norm() const noexcept {
    double s = 0.0;
    for (const Complex& z : values) s += std::norm(z);
    return std::sqrt(s * grid.weight());
}

GridFunction& GridFunction::scale(double c) noexcept {
    for (Complex& z : values) z *= c;
    return *this;
}

SampledCoefficients sample_on_grid(const OperatorSpec& spec, const Grid& grid) {
    if (grid.dim() != spec.n) throw std::invalid_argument("grid dimension does not match the spec");
    SampledCoefficients out{grid, {}};
    out.nodes.reserve(grid.size());
    const double h_fd = default_fd_step(spec);
    for (std::size_t i = 0; i < grid.size(); ++i) out.nodes.push_back(sample_operator(spec, grid.node(i), h_fd));
    return out;
}

}  // namespace dissipate
