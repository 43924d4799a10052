#pragma once

#include <string>

namespace dcpx {

class Shape {
 public:
  Shape() = default;
  Shape(int rows, int cols);

  static Shape scalar() { return {}; }
  static Shape vector(int n) { return Shape(n, 1); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }
  bool is_column() const { return cols_ == 1; }

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  int rows_ = 1;
  int cols_ = 1;
};

std::string to_string(const Shape& shape);

}  // namespace dcpx
