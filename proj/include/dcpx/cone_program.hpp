#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dcpx {

// Product cone laid out as one zero segment, one nonnegative segment, then
// second-order cones in order. Each SOC dimension counts the head t together
// with the tail v.
struct ConeSpec {
  int zero = 0;
  int nonneg = 0;
  std::vector<int> soc;

  int total() const;
  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct ColumnRange {
  int offset = 0;
  int size = 0;

  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

// minimize c'x subject to Ax + s = b, s in K.
//
// Triplets are sorted row-major; rows are already ordered cone-segment-major
// by construction. `offset` is the constant dropped from the objective; it is
// not part of the dump format.
struct ConeProgram {
  Eigen::VectorXd c;
  std::vector<Triplet> a;
  Eigen::VectorXd b;
  ConeSpec cones;
  std::map<std::int64_t, ColumnRange> var_index;
  double offset = 0.0;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }

  Eigen::SparseMatrix<double> a_matrix() const;
  // Throws DimensionMismatch when the parts disagree in size.
  void validate() const;
};

// Bitwise comparison of c, b, triplets and cones.
bool identical(const ConeProgram& p, const ConeProgram& q);

// Text dump:
//   cone-program v1
//   vars N
//   c <N decimals>
//   b <M decimals>
//   cones zero:K nonneg:L [soc:d1,d2,...]
//   A r c v        (one per triplet)
// Decimals use 17 significant digits so a dump re-reads to the same bits.
std::string write_cone_program(const ConeProgram& prog);
ConeProgram read_cone_program(std::string_view text);

}  // namespace dcpx
