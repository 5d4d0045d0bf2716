#pragma once

#include <vector>

#include "r2dnet/roesser.hpp"

namespace r2dnet {

/// Dense rows x cols grid of equally sized vectors.
class VectorField {
 public:
  VectorField() = default;
  VectorField(int rows, int cols, int dim)
      : rows_(rows), cols_(cols), dim_(dim),
        data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), Vector::Zero(dim)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return dim_; }
  bool empty() const { return data_.empty(); }

  Vector& operator()(int i, int j) { return data_[index(i, j)]; }
  const Vector& operator()(int i, int j) const { return data_[index(i, j)]; }

 private:
  size_t index(int i, int j) const {
    return static_cast<size_t>(i) * static_cast<size_t>(cols_) + static_cast<size_t>(j);
  }

  int rows_ = 0;
  int cols_ = 0;
  int dim_ = 0;
  std::vector<Vector> data_;
};

/// Result of a grid simulation over i in [0, n1), j in [0, n2).
///
/// xh holds rows i = 0..n1 (the last row is the terminal horizontal state)
/// and xv holds columns j = 0..n2. Controller fields and y_probe are empty
/// when the run does not use them.
struct Grid2DTrajectory {
  int n1 = 0;
  int n2 = 0;
  VectorField xh;       // (n1 + 1) x n2
  VectorField xv;       // n1 x (n2 + 1)
  VectorField u;        // plant input
  VectorField y;        // plant output
  VectorField y_quant;  // value received by the controller, Q_p(y(i, j_k))
  VectorField u_c;
  VectorField y_c;
  VectorField y_c_quant;
  VectorField xh_c;
  VectorField xv_c;
  /// Q_p(y) of each column computed with the held transmission; it is what
  /// the trigger rule inspects. Filled only in event-triggered runs.
  VectorField y_probe;
  std::vector<int> trigger_instants;
};

}  // namespace r2dnet
