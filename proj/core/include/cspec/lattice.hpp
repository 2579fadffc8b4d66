#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace cspec {

inline constexpr int kMaxDimension = 4;

/// A point of Z^d written additively. Dimension is carried with the value and
/// must agree between operands of arithmetic.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(int dimension);
  LatticePoint(std::initializer_list<std::int64_t> coords);
  explicit LatticePoint(std::span<const std::int64_t> coords);

  static LatticePoint unit(int dimension, int axis);

  int dimension() const noexcept { return dim_; }
  std::int64_t operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  /// |mu|_inf
  std::int64_t sup_norm() const noexcept;
  bool is_zero() const noexcept;

  /// xi . mu for a torus point given by its components.
  double dot(std::span<const double> xi) const;

  std::vector<std::int64_t> to_vector() const;
  std::string to_string() const;

  LatticePoint operator-() const;
  LatticePoint& operator+=(const LatticePoint& o);
  LatticePoint& operator-=(const LatticePoint& o);
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) { return a -= b; }

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) = default;
  friend std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) = default;

 private:
  int dim_ = 0;
  std::array<std::int64_t, kMaxDimension> c_{};
};

/// Enumerates the cube {mu : |mu|_inf <= radius} in lexicographic order
/// (first coordinate most significant).
std::vector<LatticePoint> box_points(int dimension, std::int64_t radius);

/// Number of points of the cube of the given radius, (2r+1)^d.
std::size_t box_size(int dimension, std::int64_t radius);

/// Position of `p` inside box_points(dimension, radius); requires |p|_inf <= radius.
std::size_t box_index(const LatticePoint& p, std::int64_t radius);

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept;
};

}  // namespace cspec
