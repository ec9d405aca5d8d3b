#include "roughwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace roughwave {

Grid::Grid(double x_left, double x_right, std::size_t n_cells)
    : x_left_(x_left), x_right_(x_right), n_cells_(n_cells) {
    if (!std::isfinite(x_left) || !std::isfinite(x_right) || !(x_left < x_right)) {
        throw std::invalid_argument("grid: x_left must be finite and less than x_right");
    }
    if (n_cells == 0) {
        throw std::invalid_argument("grid: n_cells must be at least 1");
    }
    dx_ = (x_right - x_left) / static_cast<double>(n_cells);
}

Grid make_grid(double x_left, double x_right, std::size_t n_cells) {
    return Grid(x_left, x_right, n_cells);
}

CellField::CellField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_cells()) {
        std::ostringstream msg;
        msg << "cell field: " << values_.size() << " values for " << grid_.n_cells() << " cells";
        throw std::invalid_argument(msg.str());
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("cell field: non-finite value in cell " + std::to_string(i));
        }
    }
}

CellField::CellField(Grid grid) : grid_(grid), values_(grid.n_cells(), 0.0) {}

double CellField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double CellField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double CellField::mass() const {
    return grid_.dx() * std::accumulate(values_.begin(), values_.end(), 0.0);
}

CellField project(const ScalarFunction& f, const Grid& grid, std::size_t points_per_cell) {
    if (points_per_cell == 0) {
        throw std::invalid_argument("project: quadrature needs at least one point per cell");
    }
    const double h = grid.dx() / static_cast<double>(points_per_cell);
    std::vector<double> values(grid.n_cells());
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const double left = grid.left_edge(i);
        double sum = 0.0;
        for (std::size_t q = 0; q < points_per_cell; ++q) {
            const double y = f(left + (static_cast<double>(q) + 0.5) * h);
            if (!std::isfinite(y)) {
                throw std::domain_error("project: non-finite function value in cell " +
                                        std::to_string(i));
            }
            sum += y;
        }
        values[i] = sum / static_cast<double>(points_per_cell);
    }
    return CellField(grid, std::move(values));
}

CellField restrict_field(const CellField& fine, std::size_t factor) {
    const Grid& g = fine.grid();
    if (factor == 0 || g.n_cells() % factor != 0) {
        throw std::invalid_argument("restrict: factor " + std::to_string(factor) +
                                    " does not divide " + std::to_string(g.n_cells()) + " cells");
    }
    if (factor == 1) {
        return fine;
    }
    const std::size_t n_coarse = g.n_cells() / factor;
    std::vector<double> values(n_coarse);
    const auto v = fine.values();
    for (std::size_t i = 0; i < n_coarse; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < factor; ++j) {
            sum += v[i * factor + j];
        }
        values[i] = sum / static_cast<double>(factor);
    }
    return CellField(Grid(g.x_left(), g.x_right(), n_coarse), std::move(values));
}

CellField restrict_to(const CellField& fine, const Grid& coarse) {
    const Grid& g = fine.grid();
    if (g.x_left() != coarse.x_left() || g.x_right() != coarse.x_right()) {
        throw std::invalid_argument("restrict: grids cover different domains");
    }
    if (g.n_cells() % coarse.n_cells() != 0) {
        throw std::invalid_argument("restrict: coarse cell count " +
                                    std::to_string(coarse.n_cells()) + " does not divide " +
                                    std::to_string(g.n_cells()));
    }
    return restrict_field(fine, g.n_cells() / coarse.n_cells());
}

}  // namespace roughwave
