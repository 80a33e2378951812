#pragma once

#include <vector>

#include <Eigen/Core>

namespace binet::nn {

/// Rank-2 tensor: row-major 64-bit values. Rows are batch entries.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using Vector = Eigen::VectorXd;

/// Rank-3 tensor stored as one matrix per timestep. Timestep t holds the rows
/// of the cases still active at t; active counts never increase with t, so
/// row i always belongs to the same case.
using Sequence = std::vector<Matrix>;

}  // namespace binet::nn
