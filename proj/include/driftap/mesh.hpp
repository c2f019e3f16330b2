#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "driftap/errors.hpp"

namespace driftap {

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0{0.0};
  double x1{1.0};
  double y0{0.0};
  double y1{1.0};

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Uniform Cartesian grid with one ghost ring. Interior cells are i = 1..nx,
/// j = 1..ny; index 0 and nx+1 (ny+1) are ghosts.
struct GridSpec {
  int nx{0};
  int ny{0};
  double dx{0.0};
  double dy{0.0};
  Rect domain{};

  double x_center(int i) const { return domain.x0 + (i - 0.5) * dx; }
  double y_center(int j) const { return domain.y0 + (j - 0.5) * dy; }
  double cell_area() const { return dx * dy; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec build_grid(int nx, int ny, Rect domain = {}) {
  if (nx < 2 || ny < 2) {
    throw InvalidDimensionError("grid needs at least 2 cells per direction, got " +
                                std::to_string(nx) + " x " + std::to_string(ny));
  }
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0) || !std::isfinite(domain.width()) ||
      !std::isfinite(domain.height())) {
    throw InvalidDimensionError("degenerate domain");
  }
  return GridSpec{nx, ny, domain.width() / nx, domain.height() / ny, domain};
}

/// Cell-centred scalar lattice of (nx+2) x (ny+2) values, x index fastest.
class Field {
 public:
  Field() = default;
  Field(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx + 2) * (ny + 2), value) {}
  explicit Field(const GridSpec& g, double value = 0.0) : Field(g.nx, g.ny, value) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool matches(const GridSpec& g) const { return nx_ == g.nx && ny_ == g.ny; }

  void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_ + 2) +
           static_cast<std::size_t>(i);
  }

  int nx_{0};
  int ny_{0};
  std::vector<double> data_;
};

/// Boundary sides in ghost-fill order; corners end up holding South/North data.
enum class Side { West = 0, East = 1, South = 2, North = 3 };

inline constexpr std::array<Side, 4> kFillOrder{Side::West, Side::East, Side::South, Side::North};

inline const char* side_name(Side s) {
  switch (s) {
    case Side::West: return "West";
    case Side::East: return "East";
    case Side::South: return "South";
    case Side::North: return "North";
  }
  return "?";
}

/// Conserved values (n, n u_x, n u_y, n u_z) of a single cell or boundary side.
struct CellValues {
  double n{1.0};
  double mx{0.0};
  double my{0.0};
  double mz{0.0};

  friend bool operator==(const CellValues&, const CellValues&) = default;
};

struct BoundarySpec {
  std::array<CellValues, 4> sides{};

  CellValues& operator[](Side s) { return sides[static_cast<std::size_t>(s)]; }
  const CellValues& operator[](Side s) const { return sides[static_cast<std::size_t>(s)]; }

  void validate() const {
    for (Side s : kFillOrder) {
      if (!((*this)[s].n > 0.0)) {
        throw NonPositiveDensityError(std::string("boundary density on ") + side_name(s) +
                                      " must be positive");
      }
    }
  }

  friend bool operator==(const BoundarySpec&, const BoundarySpec&) = default;
};

/// Writes the per-side Dirichlet values into the ghost ring of one field,
/// in the order West, East, South, North. Interior cells are untouched.
inline void fill_ghosts(Field& f, const std::array<double, 4>& side_values) {
  const int nx = f.nx();
  const int ny = f.ny();
  if (nx < 1 || ny < 1) throw SizeMismatchError("field has no interior");
  for (int j = 0; j <= ny + 1; ++j) f(0, j) = side_values[0];
  for (int j = 0; j <= ny + 1; ++j) f(nx + 1, j) = side_values[1];
  for (int i = 0; i <= nx + 1; ++i) f(i, 0) = side_values[2];
  for (int i = 0; i <= nx + 1; ++i) f(i, ny + 1) = side_values[3];
}

}  // namespace driftap
