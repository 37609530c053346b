// Copyright 2026 The pecsim Authors
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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pecsim {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Integer power for small non-negative exponents.
constexpr std::size_t ipow(std::size_t base, int exponent) {
  std::size_t result = 1;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

/// Offsets of each local basis index inside a register of `n` sites of
/// dimension `base`. Site 0 is the most significant digit, both globally and
/// among `positions`.
inline std::vector<std::size_t> local_offsets(std::size_t base, int n,
                                              std::span<const int> positions) {
  const auto k = static_cast<int>(positions.size());
  const std::size_t local_dim = ipow(base, k);
  std::vector<std::size_t> offsets(local_dim, 0);
  for (std::size_t l = 0; l < local_dim; ++l) {
    std::size_t rem = l;
    std::size_t offset = 0;
    for (int j = k - 1; j >= 0; --j) {
      offset += (rem % base) * ipow(base, n - 1 - positions[static_cast<std::size_t>(j)]);
      rem /= base;
    }
    offsets[l] = offset;
  }
  return offsets;
}

/// Applies `local` (dimension base^k) to the sites `positions` of `vec`
/// (dimension base^n) in place.
template <typename Vec, typename Mat>
void apply_local(Vec& vec, std::size_t base, int n, std::span<const int> positions,
                 const Mat& local) {
  using Scalar = typename Vec::Scalar;
  const std::vector<std::size_t> offsets = local_offsets(base, n, positions);
  const auto local_dim = static_cast<Eigen::Index>(offsets.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gathered(local_dim);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> result(local_dim);
  const auto total = static_cast<std::size_t>(vec.size());
  for (std::size_t anchor = 0; anchor < total; ++anchor) {
    // Anchors are indices whose digits at `positions` are all zero.
    bool is_anchor = true;
    for (int p : positions) {
      if ((anchor / ipow(base, n - 1 - p)) % base != 0) {
        is_anchor = false;
        break;
      }
    }
    if (!is_anchor) continue;
    for (Eigen::Index l = 0; l < local_dim; ++l) {
      gathered(l) = vec(static_cast<Eigen::Index>(anchor + offsets[static_cast<std::size_t>(l)]));
    }
    result.noalias() = local * gathered;
    for (Eigen::Index l = 0; l < local_dim; ++l) {
      vec(static_cast<Eigen::Index>(anchor + offsets[static_cast<std::size_t>(l)])) = result(l);
    }
  }
}

}  // namespace pecsim
