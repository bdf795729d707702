#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spherelag {

// Base class for every domain error raised by the library. The CLI maps
// these to exit code 1; anything else is a bug or a usage error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Two rows of a node file map to the same point on the sphere.
class DuplicatePoints : public Error {
 public:
  DuplicatePoints(std::size_t first_line, std::size_t second_line)
      : Error("duplicate points at lines " + std::to_string(first_line) + " and " +
              std::to_string(second_line)),
        first_line_(first_line),
        second_line_(second_line) {}

  std::size_t first_line() const noexcept { return first_line_; }
  std::size_t second_line() const noexcept { return second_line_; }

 private:
  std::size_t first_line_;
  std::size_t second_line_;
};

// A bordered kernel system whose LU factorization hit a pivot below the
// singularity threshold. Usually a non-unisolvent subset or repeated nodes.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

class NonUnisolventNeighborhood : public Error {
 public:
  using Error::Error;
};

class StencilFailure : public Error {
 public:
  explicit StencilFailure(std::vector<std::size_t> centers)
      : Error(describe(centers)), centers_(std::move(centers)) {}

  const std::vector<std::size_t>& centers() const noexcept { return centers_; }

 private:
  static std::string describe(const std::vector<std::size_t>& centers) {
    std::string msg = "local stencil solve failed for " + std::to_string(centers.size()) +
                      " center(s):";
    const std::size_t shown = centers.size() < 16 ? centers.size() : 16;
    for (std::size_t i = 0; i < shown; ++i) msg += " " + std::to_string(centers[i]);
    if (shown < centers.size()) msg += " ...";
    return msg;
  }

  std::vector<std::size_t> centers_;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace spherelag
