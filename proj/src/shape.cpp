#include "dcpx/shape.hpp"

#include "dcpx/error.hpp"

namespace dcpx {

Shape::Shape(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::UnsupportedShape,
                "shape dimensions must be positive, got (" + std::to_string(rows) + ", " +
                    std::to_string(cols) + ")");
  }
}

std::string to_string(const Shape& shape) {
  return "(" + std::to_string(shape.rows()) + ", " + std::to_string(shape.cols()) + ")";
}

}  // namespace dcpx
