#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// 0-based feature indices, kept sorted ascending. CSV and config surfaces
// use 1-based ids (feature_1..feature_p); the shift happens only at I/O.
using IndexSet = std::vector<int>;

// Bad arguments or an invalid configuration (CLI exit code 2).
struct param_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or unusable input data (CLI exit code 3).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure, e.g. a factorization that did not go through.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool contains(const IndexSet& s, int j) {
    return std::binary_search(s.begin(), s.end(), j);
}

}  // namespace jsel
