#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ftreg/dense_tensor.hpp"
#include "ftreg/grid.hpp"

namespace ftreg {

// Binary tensor container ("FTRT1"): one line of compact JSON
//   {"magic":"FTRT1","dims":[...],"dtype":"f64","layout":"mode0-fastest"}
// terminated by '\n', followed by prod(dims) little-endian IEEE-754 doubles
// in the declared layout.
void write_tensor_file(const std::filesystem::path& path, const DenseTensor& tensor);
DenseTensor read_tensor_file(const std::filesystem::path& path);

// Writes via a temporary file in the same directory plus an atomic rename,
// so failures never leave a partially written output behind.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

// RFC-4180 CSV with a mandatory header row; numbers use '.' decimals and
// round-trip precision.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::vector<std::string>* header = nullptr);

std::string format_double(double v);

// Vector CSV with columns (index, value).
void write_vector_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

// Grid CSV with columns (index, t); indices 0 and p0+1 carry the endpoints.
void write_grid_csv(const std::filesystem::path& path, const Grid& grid);
Grid read_grid_csv(const std::filesystem::path& path);

// Scalar-covariate CSV: header row naming q columns, one row per sample.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* header = nullptr);

}  // namespace ftreg
