#pragma once

#include <filesystem>

#include <Eigen/Dense>

#include "lvglasso/edge_set.hpp"

namespace lvglasso {

// Plain comma-separated numeric rows, no header, row-major. Values carry 17
// significant digits so write-then-read round-trips exactly.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

// Parse failures name the offending row/column and token.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// One "i,j" line per edge, ascending.
void write_edges_csv(const std::filesystem::path& path, const EdgeSet& edges);
EdgeSet read_edges_csv(const std::filesystem::path& path, int p);

}  // namespace lvglasso
