#pragma once

#include <algorithm>
#include <bit>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dcpx/cli.hpp"
#include "dcpx/dcpx.hpp"

namespace testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(DCPX_FIXTURE_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline dcpx::LoadedProblem load_fixture(const std::string& name) {
  return dcpx::parse_problem_file(read_text(fixture_path(name)));
}

inline std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(DCPX_FIXTURE_DIR)) {
    if (e.path().extension() == ".dcp") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

inline CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = dcpx::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace testing
