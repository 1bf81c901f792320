#pragma once

#include <string>

#include "voltra/operators.hpp"

namespace voltra {

// Dense CSV, row-major, n columns per line, full n x n including zeros.
void save_kernel_csv(const KernelOperator& a, const std::string& path);

// Reads a dense square matrix; throws IoError on unreadable paths, ragged
// rows, non-numeric fields, or a non-square shape.
Eigen::MatrixXd load_dense_csv(const std::string& path);

// Loads a kernel matrix for the given grid; rejects matrices that are not
// strictly lower triangular or whose size does not match the grid.
KernelOperator load_kernel_csv(const std::string& path, const Grid& grid,
                               EntryMode mode = EntryMode::NodeSample);

}  // namespace voltra
