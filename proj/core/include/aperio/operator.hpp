#pragma once

#include "aperio/geometry.hpp"
#include "aperio/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aperio {

/// Finite-volume operator on l^2(sites) (x) C^q. Basis index = site * q + k.
struct OperatorSample {
  int dimension = 1;
  std::vector<Vec> sites;
  int q = 1;
  CMat matrix;
  Box window;
  double bulk_margin = 0;
  /// Largest displacement carried by a nonzero block.
  double range = 0;
  /// Torus periods (0 on open axes). Set only for wrapped samples.
  std::optional<Vec> period;
  std::vector<bool> boundary_affected;
  std::vector<std::string> warnings;

  std::size_t n_sites() const { return sites.size(); }
  Eigen::Index dim() const { return matrix.rows(); }

  /// y - x, reduced to the minimal image on wrapped axes.
  Vec displacement(std::size_t from, std::size_t to) const;
  Box bulk_window() const { return window.eroded(bulk_margin); }
  std::vector<std::size_t> bulk_sites() const;
  /// Basis indices belonging to the given sites.
  std::vector<Eigen::Index> basis_indices(const std::vector<std::size_t>& sites_subset) const;

  /// Same geometry and metadata, new matrix.
  OperatorSample with_matrix(CMat m) const;
  /// Copy with an explicit bulk margin.
  OperatorSample with_margin(double margin) const;
};

}  // namespace aperio
