#include "spherelag_cli/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "spherelag/error.hpp"

namespace spherelag::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_index(std::string_view s, std::size_t& v) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::vector<std::string> RunConfig::lines() const {
  return {"spherelag " + version, "command: " + command, "seed: " + std::to_string(seed)};
}

Eigen::VectorXd read_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open data file " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    double v = 0.0;
    if (!parse_double(t, v)) throw ParseError(path.string(), lineno, "expected one number");
    values.push_back(v);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_coefficients(const std::filesystem::path& path, const Coefficients& coeffs,
                        const RunConfig& config) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot write " + path.string());
  for (const auto& l : config.lines()) std::fprintf(f, "# %s\n", l.c_str());
  std::fprintf(f, "kind,index,value\n");
  for (Eigen::Index i = 0; i < coeffs.a.size(); ++i) std::fprintf(f, "a,%td,%.17g\n", i, coeffs.a[i]);
  for (Eigen::Index j = 0; j < coeffs.c.size(); ++j) std::fprintf(f, "c,%td,%.17g\n", j, coeffs.c[j]);
  if (std::fclose(f) != 0) throw Error("error writing " + path.string());
}

Coefficients read_coefficients(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open coefficient file " + path.string());
  std::vector<double> a, c;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "kind,index,value") throw ParseError(path.string(), lineno, "missing kind,index,value header");
      header = true;
      continue;
    }
    const auto c1 = t.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : t.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ParseError(path.string(), lineno, "expected kind,index,value");
    const std::string_view kind = t.substr(0, c1);
    std::size_t idx = 0;
    double v = 0.0;
    if (!parse_index(t.substr(c1 + 1, c2 - c1 - 1), idx) || !parse_double(t.substr(c2 + 1), v)) {
      throw ParseError(path.string(), lineno, "malformed row");
    }
    std::vector<double>* dst = kind == "a" ? &a : kind == "c" ? &c : nullptr;
    if (!dst) throw ParseError(path.string(), lineno, "unknown kind '" + std::string(kind) + "'");
    if (idx != dst->size()) throw ParseError(path.string(), lineno, "indices must be consecutive from 0");
    dst->push_back(v);
  }
  if (!header) throw ParseError(path.string(), lineno, "empty coefficient file");
  Coefficients out;
  out.a = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  out.c = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  return out;
}

}  // namespace spherelag::cli
