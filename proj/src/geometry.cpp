#include "bornwalk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bornwalk/error.hpp"

namespace bornwalk {

DetectorArray::DetectorArray(std::vector<Cell> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) {
    throw Error(ErrorKind::ConfigInvalid, "detector array needs at least one cell (n >= 2)");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    const std::string where = "cells[" + std::to_string(i) + "]";
    if (std::isnan(c.x_min) || std::isnan(c.x_max) || std::isnan(c.y_min) || std::isnan(c.y_max)) {
      throw Error(ErrorKind::ConfigInvalid, where + " has a NaN bound");
    }
    if (c.x_min > c.x_max || c.y_min > c.y_max) {
      throw Error(ErrorKind::ConfigInvalid, where + " has min > max");
    }
  }
}

std::size_t DetectorArray::region_index(double x, double y) const noexcept {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].contains(x, y)) return i + 1;
  }
  return region_count();
}

std::vector<Violation> validate(const DetectorArray& array) {
  std::vector<Violation> out;
  const auto& cells = array.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!(cells[i].x_max > cells[i].x_min) || !(cells[i].y_max > cells[i].y_min)) {
      out.push_back({Violation::Kind::Degenerate, i + 1, 0});
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      const Cell& a = cells[i];
      const Cell& b = cells[j];
      const bool x_overlap = std::max(a.x_min, b.x_min) < std::min(a.x_max, b.x_max);
      const bool y_overlap = std::max(a.y_min, b.y_min) < std::min(a.y_max, b.y_max);
      if (x_overlap && y_overlap) out.push_back({Violation::Kind::Overlap, i + 1, j + 1});
    }
  }
  return out;
}

}  // namespace bornwalk
