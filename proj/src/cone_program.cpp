#include "dcpx/cone_program.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "dcpx/error.hpp"

namespace dcpx {

int ConeSpec::total() const { return zero + nonneg + std::accumulate(soc.begin(), soc.end(), 0); }

Eigen::SparseMatrix<double> ConeProgram::a_matrix() const {
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(a.size());
  for (const Triplet& t : a) ts.emplace_back(t.row, t.col, t.value);
  Eigen::SparseMatrix<double> m(num_rows(), num_vars());
  m.setFromTriplets(ts.begin(), ts.end());
  return m;
}

void ConeProgram::validate() const {
  if (cones.total() != num_rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cones cover " + std::to_string(cones.total()) + " rows but b has " +
                    std::to_string(num_rows()));
  }
  if (cones.zero < 0 || cones.nonneg < 0) {
    throw Error(ErrorCode::DimensionMismatch, "negative cone size");
  }
  for (int d : cones.soc) {
    if (d < 1) throw Error(ErrorCode::DimensionMismatch, "second-order cone of dimension < 1");
  }
  for (const Triplet& t : a) {
    if (t.row < 0 || t.row >= num_rows() || t.col < 0 || t.col >= num_vars()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "A entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                      ") outside " + std::to_string(num_rows()) + " x " +
                      std::to_string(num_vars()));
    }
  }
}

namespace {

bool same_bits(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) return false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(u[i]) != std::bit_cast<std::uint64_t>(v[i])) return false;
  }
  return true;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool identical(const ConeProgram& p, const ConeProgram& q) {
  if (!same_bits(p.c, q.c) || !same_bits(p.b, q.b) || !(p.cones == q.cones)) return false;
  if (p.a.size() != q.a.size()) return false;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    const Triplet& s = p.a[i];
    const Triplet& t = q.a[i];
    if (s.row != t.row || s.col != t.col ||
        std::bit_cast<std::uint64_t>(s.value) != std::bit_cast<std::uint64_t>(t.value)) {
      return false;
    }
  }
  return true;
}

std::string write_cone_program(const ConeProgram& prog) {
  std::string out = "cone-program v1\n";
  out += "vars " + std::to_string(prog.num_vars()) + "\n";
  out += "c";
  for (Eigen::Index i = 0; i < prog.c.size(); ++i) out += " " + fmt(prog.c[i]);
  out += "\nb";
  for (Eigen::Index i = 0; i < prog.b.size(); ++i) out += " " + fmt(prog.b[i]);
  out += "\ncones zero:" + std::to_string(prog.cones.zero) +
         " nonneg:" + std::to_string(prog.cones.nonneg);
  if (!prog.cones.soc.empty()) {
    out += " soc:";
    for (std::size_t i = 0; i < prog.cones.soc.size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string(prog.cones.soc[i]);
    }
  }
  out += "\n";
  for (const Triplet& t : prog.a) {
    out += "A " + std::to_string(t.row) + " " + std::to_string(t.col) + " " + fmt(t.value) + "\n";
  }
  return out;
}

namespace {

[[noreturn]] void bad_dump(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "cone dump line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& tok, int line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    bad_dump(line, "bad number '" + tok + "'");
  }
  return v;
}

int parse_int(const std::string& tok, int line) {
  int v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    bad_dump(line, "bad integer '" + tok + "'");
  }
  return v;
}

Eigen::VectorXd parse_vector(std::istringstream& in, int line) {
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(parse_double(tok, line));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

ConeProgram read_cone_program(std::string_view text) {
  std::istringstream lines{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header = false;
  bool have_vars = false;
  bool have_c = false;
  bool have_b = false;
  bool have_cones = false;
  int vars = 0;
  ConeProgram prog;
  while (std::getline(lines, line)) {
    ++lineno;
    std::istringstream in(line);
    std::string key;
    if (!(in >> key) || key[0] == '#') continue;
    if (!header) {
      std::string version;
      in >> version;
      if (key != "cone-program" || version != "v1") bad_dump(lineno, "expected 'cone-program v1'");
      header = true;
      continue;
    }
    if (key == "vars") {
      std::string tok;
      if (!(in >> tok)) bad_dump(lineno, "missing variable count");
      vars = parse_int(tok, lineno);
      if (vars < 0) bad_dump(lineno, "negative variable count");
      have_vars = true;
    } else if (key == "c") {
      prog.c = parse_vector(in, lineno);
      have_c = true;
    } else if (key == "b") {
      prog.b = parse_vector(in, lineno);
      have_b = true;
    } else if (key == "cones") {
      std::string tok;
      while (in >> tok) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) bad_dump(lineno, "bad cone entry '" + tok + "'");
        std::string name = tok.substr(0, colon);
        std::string val = tok.substr(colon + 1);
        if (name == "zero") {
          prog.cones.zero = parse_int(val, lineno);
        } else if (name == "nonneg") {
          prog.cones.nonneg = parse_int(val, lineno);
        } else if (name == "soc") {
          std::istringstream dims(val);
          std::string d;
          while (std::getline(dims, d, ',')) prog.cones.soc.push_back(parse_int(d, lineno));
        } else {
          bad_dump(lineno, "unknown cone '" + name + "'");
        }
      }
      have_cones = true;
    } else if (key == "A") {
      std::string r, c, v, extra;
      if (!(in >> r >> c >> v) || (in >> extra)) bad_dump(lineno, "expected 'A row col value'");
      prog.a.push_back(Triplet{parse_int(r, lineno), parse_int(c, lineno), parse_double(v, lineno)});
    } else {
      bad_dump(lineno, "unknown record '" + key + "'");
    }
  }
  if (!header) bad_dump(lineno, "empty dump");
  if (!have_vars || !have_c || !have_b || !have_cones) {
    bad_dump(lineno, "dump needs vars, c, b and cones records");
  }
  if (prog.c.size() != vars) {
    throw Error(ErrorCode::DimensionMismatch, "c has " + std::to_string(prog.c.size()) +
                                                  " entries, vars says " + std::to_string(vars));
  }
  prog.validate();
  return prog;
}

}  // namespace dcpx
