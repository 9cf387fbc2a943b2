#pragma once

#include <Eigen/Dense>
#include <vector>

namespace haslr {

/// Training feature matrix: one unit-norm column per training sample, with
/// its class label and pre-normalization norm.
struct Dictionary {
    Eigen::MatrixXd atoms;          // d x n, unit-norm columns
    std::vector<int> labels;        // length n
    Eigen::VectorXd column_norms;   // pre-normalization norms, length n

    long dim() const { return atoms.rows(); }
    long size() const { return atoms.cols(); }
};

/// L2-normalizes each feature vector into a column. Throws
/// std::invalid_argument for zero vectors or ragged lengths.
Dictionary build_dictionary(const std::vector<std::pair<Eigen::VectorXd, int>>& features);

}  // namespace haslr
