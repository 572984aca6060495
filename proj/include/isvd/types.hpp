#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace isvd {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

struct Shape {
  Index rows = 0;
  Index cols = 0;

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

// Incompatible operand dimensions, bad indices, empty operand lists.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An EvalCache was offered a right-hand matrix it was not populated with.
class CacheMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical breakdown that the caller cannot recover from (all-zero spectrum,
// non-finite loss, orthonormalization failure after every fallback).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; the message carries path and line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isvd
