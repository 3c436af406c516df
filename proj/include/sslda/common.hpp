#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sslda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Observations are rows, features are columns.
using Sample = Eigen::MatrixXd;

// Bad user input: wrong shapes, non-finite entries, degenerate problems.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solver or factorization failed on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws InputError unless `x` has at least `min_rows` rows, at least one
// column and only finite entries. `what` names the argument in the message.
void require_sample(const Eigen::Ref<const Matrix>& x, Index min_rows, const std::string& what);

}  // namespace sslda
