#include "cspec/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace cspec {

namespace {

void check_dimension(int d) {
  if (d < 0 || d > kMaxDimension) {
    throw std::invalid_argument("lattice dimension " + std::to_string(d) + " outside [0, " +
                                std::to_string(kMaxDimension) + "]");
  }
}

void check_same(int a, int b) {
  if (a != b) throw std::invalid_argument("lattice points of different dimension");
}

}  // namespace

LatticePoint::LatticePoint(int dimension) : dim_(dimension) { check_dimension(dimension); }

LatticePoint::LatticePoint(std::initializer_list<std::int64_t> coords)
    : LatticePoint(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

LatticePoint::LatticePoint(std::span<const std::int64_t> coords)
    : dim_(static_cast<int>(coords.size())) {
  check_dimension(dim_);
  for (std::size_t i = 0; i < coords.size(); ++i) c_[i] = coords[i];
}

LatticePoint LatticePoint::unit(int dimension, int axis) {
  LatticePoint p(dimension);
  if (axis < 0 || axis >= dimension) throw std::invalid_argument("axis out of range");
  p[axis] = 1;
  return p;
}

std::int64_t LatticePoint::sup_norm() const noexcept {
  std::int64_t r = 0;
  for (int i = 0; i < dim_; ++i) r = std::max<std::int64_t>(r, std::llabs(c_[static_cast<std::size_t>(i)]));
  return r;
}

bool LatticePoint::is_zero() const noexcept { return sup_norm() == 0; }

double LatticePoint::dot(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != dim_) throw std::invalid_argument("torus point dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += xi[static_cast<std::size_t>(i)] * static_cast<double>(c_[static_cast<std::size_t>(i)]);
  return s;
}

std::vector<std::int64_t> LatticePoint::to_vector() const {
  return {c_.begin(), c_.begin() + dim_};
}

std::string LatticePoint::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim_; ++i) {
    if (i) os << ',';
    os << c_[static_cast<std::size_t>(i)];
  }
  os << ')';
  return os.str();
}

LatticePoint LatticePoint::operator-() const {
  LatticePoint r(*this);
  for (int i = 0; i < dim_; ++i) r[i] = -r[i];
  return r;
}

LatticePoint& LatticePoint::operator+=(const LatticePoint& o) {
  check_same(dim_, o.dim_);
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] += o[i];
  return *this;
}

LatticePoint& LatticePoint::operator-=(const LatticePoint& o) {
  check_same(dim_, o.dim_);
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] -= o[i];
  return *this;
}

std::size_t box_size(int dimension, std::int64_t radius) {
  if (radius < 0) return 0;
  std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  std::size_t n = 1;
  for (int i = 0; i < dimension; ++i) n *= side;
  return n;
}

std::vector<LatticePoint> box_points(int dimension, std::int64_t radius) {
  std::vector<LatticePoint> out;
  if (radius < 0) return out;
  out.reserve(box_size(dimension, radius));
  LatticePoint p(dimension);
  for (int i = 0; i < dimension; ++i) p[i] = -radius;
  while (true) {
    out.push_back(p);
    int axis = dimension - 1;
    while (axis >= 0) {
      if (p[axis] < radius) {
        ++p[axis];
        break;
      }
      p[axis] = -radius;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

std::size_t box_index(const LatticePoint& p, std::int64_t radius) {
  std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  std::size_t idx = 0;
  for (int i = 0; i < p.dimension(); ++i) {
    idx = idx * side + static_cast<std::size_t>(p[i] + radius);
  }
  return idx;
}

std::size_t LatticePointHash::operator()(const LatticePoint& p) const noexcept {
  std::size_t h = static_cast<std::size_t>(p.dimension());
  for (int i = 0; i < p.dimension(); ++i) {
    h ^= std::hash<std::int64_t>{}(p[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace cspec
