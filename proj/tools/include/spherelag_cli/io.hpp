#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spherelag::cli {

// Comment header written at the top of every CSV the tool produces.
struct RunConfig {
  std::string command;  // argv joined by spaces
  unsigned long long seed = 0;
  std::string version;

  std::vector<std::string> lines() const;
};

/// One number per line; '#' comments and blank lines are skipped.
Eigen::VectorXd read_values(const std::filesystem::path& path);

struct Coefficients {
  Eigen::VectorXd a;
  Eigen::VectorXd c;
};

// "kind,index,value" rows with kind a (kernel) or c (harmonic).
void write_coefficients(const std::filesystem::path& path, const Coefficients& coeffs,
                        const RunConfig& config);
Coefficients read_coefficients(const std::filesystem::path& path);

}  // namespace spherelag::cli
