// Copyright 2026 The bicolor Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================
#ifndef BICOLOR_DATASET_HPP_
#define BICOLOR_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "bicolor/rng.hpp"

namespace bicolor {

struct SparseRow {
  double label = 1.0;  // -1 or +1
  std::vector<std::uint32_t> indices;  // 0-based, strictly ascending
  std::vector<double> values;
};

struct SparseDataset {
  std::vector<SparseRow> rows;
  std::size_t d = 0;

  std::size_t size() const { return rows.size(); }
  /// Row-major design matrix (rows x d).
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix() const;
  Eigen::VectorXd labels() const;
};

/// Reads `<label> <idx>:<val> ...` lines with 1-based ascending indices.
/// Label 0 is read as -1. Blank lines and text after '#' are skipped.
/// `dimension` pads d; it must be at least the largest index seen.
SparseDataset parse_libsvm(std::istream& in,
                           std::optional<std::size_t> dimension = std::nullopt);

/// Plain or gzip-compressed file.
SparseDataset load_libsvm(const std::string& path,
                          std::optional<std::size_t> dimension = std::nullopt);

void write_libsvm(std::ostream& out, const SparseDataset& data);

struct Partition {
  std::vector<SparseDataset> shards;
  std::vector<SparseRow> discarded;
};

/// Shuffles rows and splits them into n shards of floor(rows / n) rows.
Partition partition(const SparseDataset& data, std::size_t n, Rng& rng);

/// (1/(4m)) lambda_max(A'A) + mu by power iteration to relative tolerance.
double estimate_L(const SparseDataset& shard, double mu, double tol = 1e-10,
                  std::size_t max_iterations = 10000);

/// mu with (L_data + mu) / mu = kappa, i.e. L_data / (kappa - 1).
double scale_mu_for_kappa(double L_data, double kappa);

struct SyntheticLogisticSpec {
  std::size_t rows = 1000;
  std::size_t d = 50;
  /// Fraction of nonzero features per row.
  double density = 0.2;
  /// Probability of flipping a label, so the data is not separable.
  double label_noise = 0.1;
  std::uint64_t seed = 0;
};

SparseDataset make_synthetic_logistic(const SyntheticLogisticSpec& spec);

}  // namespace bicolor

#endif  // BICOLOR_DATASET_HPP_
