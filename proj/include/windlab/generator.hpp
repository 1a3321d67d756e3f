#pragma once

#include <Eigen/Sparse>

#include "windlab/calculus.hpp"
#include "windlab/drift.hpp"

namespace windlab {

using SparseMat = Eigen::SparseMatrix<double>;

struct GeneratorDiagnostics {
  double peclet = 0.0;        // max_k |b^k| dx_k
  bool peclet_warning = false;
  double min_offdiag = 0.0;   // most negative off-diagonal entry
};

/// L f = 1/2 Lap f + <b, df>, assembled on node fields. The Laplacian is the
/// volume-weighted codifferential of the differential; the advection pairs
/// edge-averaged df with the node drift. Rows sum to zero exactly.
struct GeneratorMatrix {
  SparseMat L;
  NodeVectorField b;
  GeneratorDiagnostics diagnostics;
};

GeneratorMatrix assemble_generator(const DiscreteCalculus& calc, const NodeVectorField& b);

// Per-axis building blocks shared with the tilted operators.
SparseMat forward_difference_matrix(const DiscreteCalculus& calc, int axis);
SparseMat edge_to_node_average(const DiscreteCalculus& calc, int axis);
// Advection by a node vector field: sum_k diag(v_k) . centered difference.
SparseMat advection_matrix(const DiscreteCalculus& calc, const NodeVectorField& v);
// 1/2 * volume-weighted Laplacian as a sparse matrix.
SparseMat half_laplacian_matrix(const DiscreteCalculus& calc, const Vec& weights);

struct InvariantMeasure {
  Vec m;                // node probability weights, sum to 1
  ScalarField rho_vol;  // density of m w.r.t. the volume measure
  ScalarField V;        // -log rho_vol
  NodeVectorField r;    // b + 1/2 grad V
  OneForm gr_edges;     // g r, averaged to edges
  double stationarity_residual = 0.0;  // ||L^T m|| / ||m||
  double rr_residual = 0.0;            // sup |d*_m (g r)|
};

InvariantMeasure invariant_measure(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                   bool check_simple = true);

// Solve A x = rhs for a singular generator-like A (kernel = constants,
// rhs orthogonal to the left kernel), pinning x at node 0 and returning the
// mean-zero representative; residual reports ||A x - rhs||. Used for all
// Fredholm-type solves.
ScalarField solve_singular(const SparseMat& A, const ScalarField& rhs, const Vec& mean_weights,
                           double* residual = nullptr);

}  // namespace windlab
