#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cssc {

/// Column-sample data matrix: D rows of features, N columns of samples.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;  // size D or empty
  std::vector<std::string> sample_names;   // size N or empty

  Eigen::Index dims() const { return values.rows(); }
  Eigen::Index samples() const { return values.cols(); }

  Eigen::VectorXd column_norms() const { return values.colwise().norm(); }

  void validate() const {
    if (values.rows() < 1) throw std::invalid_argument("DataMatrix: needs at least one feature row");
    if (values.cols() < 2) throw std::invalid_argument("DataMatrix: needs at least two sample columns");
    if (!values.allFinite()) {
      for (Eigen::Index j = 0; j < values.cols(); ++j)
        for (Eigen::Index i = 0; i < values.rows(); ++i)
          if (!std::isfinite(values(i, j)))
            throw std::invalid_argument("DataMatrix: non-finite entry at row " + std::to_string(i) +
                                        ", column " + std::to_string(j));
    }
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != values.rows())
      throw std::invalid_argument("DataMatrix: feature_names size does not match row count");
    if (!sample_names.empty() && static_cast<Eigen::Index>(sample_names.size()) != values.cols())
      throw std::invalid_argument("DataMatrix: sample_names size does not match column count");
  }
};

/// Scales every column to unit Euclidean norm. Zero columns are rejected.
inline DataMatrix normalize_columns(const DataMatrix& X) {
  DataMatrix out = X;
  for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
    const double norm = out.values.col(j).norm();
    if (!(norm > std::numeric_limits<double>::min()))
      throw std::invalid_argument("normalize_columns: column " + std::to_string(j) +
                                  " has zero norm");
    out.values.col(j) /= norm;
  }
  return out;
}

}  // namespace cssc
