#pragma once

#include <Eigen/Core>

namespace springfem {

// Small dense vectors and matrices. Dimension is a runtime value (2 or 3) but
// storage never exceeds 3, so these live on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

inline Vec zero_vec(int dim) { return Vec::Zero(dim); }
inline Mat zero_mat(int dim) { return Mat::Zero(dim, dim); }

}  // namespace springfem
