#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace roughwave {

/// Uniform 1D mesh on [x_left, x_right) split into n_cells equal cells.
///
/// Cell i (0-based) is [x_left + i*dx, x_left + (i+1)*dx). Grids are plain
/// values; equality compares the defining triple, not dx.
class Grid {
public:
    Grid(double x_left, double x_right, std::size_t n_cells);

    double x_left() const { return x_left_; }
    double x_right() const { return x_right_; }
    std::size_t n_cells() const { return n_cells_; }
    double dx() const { return dx_; }
    double length() const { return x_right_ - x_left_; }

    double left_edge(std::size_t i) const { return x_left_ + static_cast<double>(i) * dx_; }
    double midpoint(std::size_t i) const { return x_left_ + (static_cast<double>(i) + 0.5) * dx_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.x_left_ == b.x_left_ && a.x_right_ == b.x_right_ && a.n_cells_ == b.n_cells_;
    }

private:
    double x_left_;
    double x_right_;
    std::size_t n_cells_;
    double dx_;
};

/// Throws std::invalid_argument unless x_left < x_right and n_cells >= 1.
Grid make_grid(double x_left, double x_right, std::size_t n_cells);

/// Piecewise-constant state: one finite cell average per grid cell.
class CellField {
public:
    /// Throws std::invalid_argument on a length mismatch or a non-finite value.
    CellField(Grid grid, std::vector<double> values);

    /// Zero-initialized field.
    explicit CellField(Grid grid);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double min() const;
    double max() const;
    /// dx * sum of values.
    double mass() const;

    friend bool operator==(const CellField&, const CellField&) = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

using ScalarFunction = std::function<double(double)>;

inline constexpr std::size_t kDefaultQuadraturePoints = 8;

/// Cell averages of f by the composite midpoint rule with
/// `points_per_cell` sub-points per cell.
///
/// Throws std::invalid_argument if points_per_cell == 0 and
/// std::domain_error (naming the cell) if f returns a non-finite value.
CellField project(const ScalarFunction& f, const Grid& grid,
                  std::size_t points_per_cell = kDefaultQuadraturePoints);

/// Fine-to-coarse restriction: each coarse value is the mean of its
/// `factor` fine children. The coarse grid spans the same domain.
CellField restrict_field(const CellField& fine, std::size_t factor);

/// Restricts `fine` onto `coarse`, which must share the domain and divide
/// the fine cell count.
CellField restrict_to(const CellField& fine, const Grid& coarse);

}  // namespace roughwave
