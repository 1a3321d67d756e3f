#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace windlab {

using ScalarField = Eigen::VectorXd;  // one value per node
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Periodic uniform grid on the unit torus T^d, d in {1,2,3}.
/// Nodes are linearized axis-0 fastest; all index arithmetic wraps.
class TorusDomain {
 public:
  TorusDomain(int dim, std::array<int, 3> resolution) : dim_(dim), n_(resolution) {
    if (dim < 1 || dim > 3) throw Error("TorusDomain: dim must be 1, 2 or 3");
    for (int k = dim; k < 3; ++k) n_[k] = 1;
    for (int k = 0; k < dim; ++k)
      if (n_[k] < 8) throw Error("TorusDomain: need at least 8 nodes per axis");
    stride_[0] = 1;
    stride_[1] = n_[0];
    stride_[2] = n_[0] * n_[1];
    nodes_ = int64_t(n_[0]) * n_[1] * n_[2];
  }

  int dim() const { return dim_; }
  int n(int k) const { return n_[k]; }
  int64_t nodes() const { return nodes_; }
  double dx(int k) const { return 1.0 / n_[k]; }
  double cell_volume() const { return 1.0 / double(nodes_); }

  int64_t index(int i0, int i1 = 0, int i2 = 0) const {
    return i0 + stride_[1] * i1 + stride_[2] * i2;
  }

  std::array<int, 3> coords(int64_t idx) const {
    std::array<int, 3> c;
    c[0] = int(idx % n_[0]);
    c[1] = int((idx / stride_[1]) % n_[1]);
    c[2] = int(idx / stride_[2]);
    return c;
  }

  // neighbor in +/- direction along axis k, periodic
  int64_t shift(int64_t idx, int k, int step) const {
    auto c = coords(idx);
    int m = c[k] + step;
    m %= n_[k];
    if (m < 0) m += n_[k];
    c[k] = m;
    return index(c[0], c[1], c[2]);
  }

  Eigen::Vector3d node_pos(int64_t idx) const {
    auto c = coords(idx);
    return {c[0] * dx(0), c[1] * dx(1), c[2] * dx(2)};
  }

 private:
  int dim_;
  std::array<int, 3> n_;
  std::array<int64_t, 3> stride_{};
  int64_t nodes_ = 0;
};

/// 1-form on the staggered grid: component k lives on the edge from node x
/// to x + e_k, stored at the base node. comp is nodes x dim.
struct OneForm {
  Eigen::MatrixXd comp;
  OneForm() = default;
  OneForm(int64_t nodes, int dim) : comp(Eigen::MatrixXd::Zero(nodes, dim)) {}
  int dim() const { return int(comp.cols()); }
  int64_t nodes() const { return comp.rows(); }
};

/// Tangent vector field sampled at nodes, per-axis components.
struct NodeVectorField {
  Eigen::MatrixXd comp;
  NodeVectorField() = default;
  NodeVectorField(int64_t nodes, int dim) : comp(Eigen::MatrixXd::Zero(nodes, dim)) {}
  int dim() const { return int(comp.cols()); }
};

}  // namespace windlab
