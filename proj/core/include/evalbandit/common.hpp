#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evalbandit {

/// Dense row-major matrix; rows index arms, columns index evaluators.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  std::span<const double> row(int i) const {
    return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
  }
  std::span<double> row(int i) {
    return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
  }
};

/// Configuration rejected; carries the list of offending fields.
class validation_error : public std::runtime_error {
 public:
  validation_error(const std::string& message, std::vector<std::string> fields)
      : std::runtime_error(message), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

/// Malformed external data (replay CSV and friends).
class data_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model cannot produce meaningful weights (e.g. all-zero alpha).
class degenerate_model_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Estimate too small for the optimistic shrinkage problem to be defined.
class degenerate_estimate_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace evalbandit
