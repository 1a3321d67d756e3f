#include "windlab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>

namespace windlab {

namespace {

struct EigResult {
  ScalarField phi;
  double lambda = 0.0;
  double resid = 0.0;
  int iters = 0;
};

struct RowScan {
  double max_abs_row_sum = 0.0;
  double min_offdiag = 0.0;
};

RowScan scan_rows(const SparseMat& A) {
  Vec rowsum = Vec::Zero(A.rows());
  RowScan s;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMat::InnerIterator it(A, c); it; ++it) {
      rowsum[it.row()] += std::abs(it.value());
      if (it.row() != it.col()) s.min_offdiag = std::min(s.min_offdiag, it.value());
    }
  s.max_abs_row_sum = rowsum.maxCoeff();
  return s;
}

EigResult dense_principal(const SparseMat& A) {
  const int64_t N = A.rows();
  Mat Ad(A);
  Eigen::EigenSolver<Mat> es(Ad);
  if (es.info() != Eigen::Success) throw Error("principal_eigen: dense solver failed");
  int best = 0;
  double best_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i)
    if (es.eigenvalues()[i].real() > best_re) {
      best_re = es.eigenvalues()[i].real();
      best = i;
    }
  Eigen::VectorXcd v = es.eigenvectors().col(best);
  // rotate the phase so the dominant component is real positive
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  std::complex<double> ph = v[imax] / std::abs(v[imax]);
  v /= ph;
  EigResult r;
  r.phi = v.real();
  if (v.imag().cwiseAbs().maxCoeff() > 1e-8 * r.phi.cwiseAbs().maxCoeff())
    throw Error("principal_eigen: rightmost eigenvector is not real");
  r.phi /= r.phi.cwiseAbs().maxCoeff();
  if (r.phi.minCoeff() <= 0.0) throw Error("principal_eigen: non-positive principal eigenvector");
  r.lambda = best_re;
  r.resid = (Ad * r.phi - r.lambda * r.phi).norm() / r.phi.norm();
  return r;
}

// Shifted power iteration to bracket the rightmost eigenvalue
// (Collatz-Wielandt on A + sigma I), then shift-invert refinement.
EigResult principal_vector(const SparseMat& A, double tol, int64_t budget,
                           const ScalarField* warm) {
  const int64_t N = A.rows();
  RowScan scan = scan_rows(A);
  if (scan.min_offdiag < -1e-12 * std::max(1.0, scan.max_abs_row_sum)) {
    if (N <= 4096) return dense_principal(A);
    throw Error("principal_eigen: operator lost positivity (tilt too large for this grid)");
  }
  const double sigma = scan.max_abs_row_sum + 1.0;

  ScalarField phi;
  if (warm && warm->size() == N && warm->minCoeff() > 0.0) phi = *warm;
  else phi = ScalarField::Ones(N);
  phi /= phi.cwiseAbs().maxCoeff();

  EigResult r;
  double lo = -sigma, hi = sigma;
  for (int it = 0; it < 30; ++it) {
    Vec y = A * phi;
    ++r.iters;
    Vec ratio = y.cwiseQuotient(phi);
    lo = ratio.minCoeff();
    hi = ratio.maxCoeff();
    r.lambda = phi.dot(y) / phi.squaredNorm();
    r.resid = (y - r.lambda * phi).norm() / phi.norm();
    if (r.resid <= tol * std::max(1.0, std::abs(r.lambda))) {
      r.phi = phi;
      if (phi.minCoeff() <= 0.0) throw Error("principal_eigen: non-positive eigenvector");
      return r;
    }
    phi = y + sigma * phi;
    double mx = phi.cwiseAbs().maxCoeff();
    phi /= mx;
    if (phi.minCoeff() <= 0.0) {
      if (N <= 4096) return dense_principal(A);
      throw Error("principal_eigen: power iterate lost positivity");
    }
    if (hi - lo < 0.5 * std::max(1.0, std::abs(hi))) break;
  }

  SparseMat I(N, N);
  I.setIdentity();
  for (int attempt = 0; attempt < 3; ++attempt) {
    double s = hi + std::max(0.5, 0.02 * (hi - lo));
    SparseMat M = s * I - A;
    M.makeCompressed();
    Eigen::SparseLU<SparseMat> lu(M);
    if (lu.info() != Eigen::Success) {
      if (N <= 4096) return dense_principal(A);
      throw Error("principal_eigen: shift-invert factorization failed");
    }
    for (int it = 0; it < 80; ++it) {
      Vec psi = lu.solve(phi);
      ++r.iters;
      double mx = psi.cwiseAbs().maxCoeff();
      psi /= mx;
      if (psi.minCoeff() <= 0.0) {
        if (N <= 4096) return dense_principal(A);
        throw Error("principal_eigen: non-positive eigenvector in refinement");
      }
      Vec y = A * psi;
      Vec ratio = y.cwiseQuotient(psi);
      lo = ratio.minCoeff();
      hi = ratio.maxCoeff();
      r.lambda = psi.dot(y) / psi.squaredNorm();
      r.resid = (y - r.lambda * psi).norm() / psi.norm();
      phi = psi;
      if (r.resid <= tol * std::max(1.0, std::abs(r.lambda))) {
        r.phi = phi;
        return r;
      }
      if (r.iters > budget)
        throw Error("principal_eigen: no convergence within " + std::to_string(budget) +
                    " iterations (residual " + std::to_string(r.resid) + ")");
    }
  }
  throw Error("principal_eigen: stagnation (residual " + std::to_string(r.resid) + ")");
}

}  // namespace

ScgfSolver::ScgfSolver(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                       SpectralOptions opts)
    : calc_(calc), gen_(gen), opts_(opts) {
  const int d = calc_.dim();
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    OneForm dxi = calc_.constant_form(e);
    adv_axis_.push_back(advection_matrix(calc_, calc_.sharp(dxi)));
    pot_lin_.push_back(lifted_apply(calc_, gen_.b, dxi));
  }
}

ScalarField ScgfSolver::potential(const Vec& c) const {
  ScalarField p = 0.5 * calc_.norm2_node(calc_.constant_form(c));
  for (int i = 0; i < calc_.dim(); ++i) p += c[i] * pot_lin_[size_t(i)];
  return p;
}

ScalarField ScgfSolver::potential_derivative(const Vec& c, int i) const {
  Vec e = Vec::Zero(calc_.dim());
  e[i] = 1.0;
  ScalarField p = calc_.pointwise_pair(calc_.constant_form(e), calc_.constant_form(c));
  p += pot_lin_[size_t(i)];
  return p;
}

TiltedOperator ScgfSolver::assemble_tilted(const Vec& c) const {
  if (c.size() != calc_.dim()) throw Error("assemble_tilted: tilt dimension mismatch");
  TiltedOperator op;
  op.c = c;
  op.A = gen_.L;
  for (int i = 0; i < calc_.dim(); ++i)
    if (c[i] != 0.0) op.A += c[i] * adv_axis_[size_t(i)];
  if (!c.isZero()) op.A += SparseMat(potential(c).asDiagonal());
  op.A.makeCompressed();
  return op;
}

TiltedOperator ScgfSolver::assemble_tilted_representative(const OneForm& rep) const {
  double scale = std::max(1.0, rep.comp.cwiseAbs().maxCoeff());
  if (calc_.plaquette_residual(rep) > 1e-8 * scale)
    throw Error("assemble_tilted_representative: representative is not closed");
  Vec c = calc_.loop_class(rep);
  OneForm exact = rep;
  exact.comp -= calc_.constant_form(c).comp;
  ScalarField v = calc_.exact_potential(exact);
  double rec = (calc_.differential(v).comp - exact.comp).cwiseAbs().maxCoeff();
  if (rec > 1e-8 * scale)
    throw Error("assemble_tilted_representative: exact-part reconstruction failed");
  if (v.cwiseAbs().maxCoeff() > 50.0)
    throw Error("assemble_tilted_representative: gauge potential too large");

  TiltedOperator base = assemble_tilted(c);
  Vec left = (-v.array()).exp();
  Vec right = v.array().exp();
  TiltedOperator op;
  op.c = c;
  op.gauge = v;
  op.rep_tag = "conjugated";
  op.A = SparseMat(left.asDiagonal()) * base.A * SparseMat(right.asDiagonal());
  op.A.makeCompressed();
  return op;
}

ScgfEvaluation ScgfSolver::principal_eigen(const TiltedOperator& op) const {
  const int64_t N = calc_.nodes();
  int64_t budget = int64_t(opts_.matvec_budget_factor * std::sqrt(double(N))) + 200;

  EigResult right = principal_vector(op.A, opts_.eig_tol, budget,
                                     have_warm_ ? &warm_right_ : nullptr);
  SparseMat At = SparseMat(op.A.transpose());
  EigResult left = principal_vector(At, opts_.eig_tol, budget,
                                    have_warm_ ? &warm_left_ : nullptr);

  ScgfEvaluation ev;
  ev.c = op.c;
  ev.phi_right = right.phi;
  ev.phi_left = left.phi;
  ev.iterations = right.iters + left.iters;
  double denom = left.phi.dot(right.phi);
  Vec Ar = op.A * right.phi;
  ev.lambda = left.phi.dot(Ar) / denom;
  ev.residual = std::max((Ar - ev.lambda * right.phi).norm() / right.phi.norm(),
                         (At * left.phi - ev.lambda * left.phi).norm() / left.phi.norm());

  // Hellmann-Feynman gradient; conjugate the eigenvectors back to the
  // dx-basis operator when the representative carried a gauge.
  ScalarField pr = right.phi, pl = left.phi;
  if (op.gauge.size() == calc_.nodes()) {
    pr = right.phi.cwiseProduct(op.gauge.array().exp().matrix());
    pl = left.phi.cwiseProduct((-op.gauge.array()).exp().matrix());
  }
  double dn = pl.dot(pr);
  ev.grad.resize(calc_.dim());
  for (int i = 0; i < calc_.dim(); ++i) {
    Vec contrib = adv_axis_[size_t(i)] * pr + potential_derivative(op.c, i).cwiseProduct(pr);
    ev.grad[i] = pl.dot(contrib) / dn;
  }

  warm_right_ = right.phi;
  warm_left_ = left.phi;
  have_warm_ = true;
  return ev;
}

ScgfEvaluation ScgfSolver::evaluate(const Vec& c) const { return principal_eigen(assemble_tilted(c)); }

double ScgfSolver::principal_eigenvalue(const TiltedOperator& op) const {
  const int64_t N = calc_.nodes();
  int64_t budget = int64_t(opts_.matvec_budget_factor * std::sqrt(double(N))) + 200;
  EigResult right = principal_vector(op.A, opts_.eig_tol, budget,
                                     have_warm_ ? &warm_right_ : nullptr);
  warm_right_ = right.phi;
  have_warm_ = true;
  return right.lambda;
}

void ScgfSolver::reset_warm_start() const {
  have_warm_ = false;
  warm_right_.resize(0);
  warm_left_.resize(0);
}

Mat ScgfSolver::hessian(const Vec& c) const {
  const int d = calc_.dim();
  const double step = opts_.fd_step;
  Mat H(d, d);
  for (int j = 0; j < d; ++j) {
    Vec cp = c, cm = c;
    cp[j] += step;
    cm[j] -= step;
    Vec gp = evaluate(cp).grad;
    Vec gm = evaluate(cm).grad;
    H.col(j) = (gp - gm) / (2.0 * step);
  }
  double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  last_hessian_asym_ = asym;
  return 0.5 * (H + H.transpose());
}

RateResult ScgfSolver::legendre_rate(const Vec& h, const HarmonicBasis& basis) const {
  const int d = calc_.dim();
  if (h.size() != d) throw Error("legendre_rate: homology dimension mismatch");

  Vec c = basis.A_inv * (h - basis.hbar);  // exact maximizer in the Gaussian case
  if (c.norm() > opts_.c_max) throw Error("legendre_rate: h outside computable range");

  reset_warm_start();
  ScgfEvaluation ev = evaluate(c);
  double F = h.dot(c) - ev.lambda;
  Mat H = hessian(c);
  int hess_age = 0;

  RateResult res;
  res.h = h;
  int it = 0;
  for (; it < opts_.newton_max_iter; ++it) {
    Vec g = h - ev.grad;
    if (g.cwiseAbs().maxCoeff() < opts_.newton_tol) break;

    Eigen::LLT<Mat> llt(H);
    Mat Hreg = H;
    double ridge = 1e-10;
    while (llt.info() != Eigen::Success && ridge < 1.0) {
      Hreg = H + ridge * Mat::Identity(d, d);
      llt.compute(Hreg);
      ridge *= 10.0;
    }
    Vec delta = llt.solve(g);

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 14; ++ls) {
      Vec c_try = c + t * delta;
      if (c_try.norm() > opts_.c_max) {
        t *= 0.5;
        continue;
      }
      ScgfEvaluation ev_try = evaluate(c_try);
      double F_try = h.dot(c_try) - ev_try.lambda;
      if (F_try >= F + 0.1 * t * g.dot(delta) - 1e-14 * (1.0 + std::abs(F))) {
        c = c_try;
        ev = ev_try;
        F = F_try;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++hess_age;
    if (!accepted || hess_age >= 6) {
      H = hessian(c);
      hess_age = 0;
      if (!accepted) {
        ScgfEvaluation ev2 = evaluate(c);
        ev = ev2;
      }
    }
  }
  Vec g = h - ev.grad;
  if (g.cwiseAbs().maxCoeff() >= opts_.newton_tol)
    throw Error("legendre_rate: Newton ascent did not converge in " +
                std::to_string(opts_.newton_max_iter) + " iterations (|h - grad| " +
                std::to_string(g.cwiseAbs().maxCoeff()) + ")");

  if (hess_age != 0) H = hessian(c);
  Eigen::LLT<Mat> llt(H);
  res.G = F;
  res.c_star = c;
  res.iterations = it;
  res.hessian_spd = llt.info() == Eigen::Success;
  return res;
}

double ScgfSolver::gc_defect(const Vec& c, const Vec& cbar) const {
  reset_warm_start();
  double a = evaluate(c).lambda;
  reset_warm_start();
  Vec c2 = -c - 2.0 * cbar;
  double b = evaluate(c2).lambda;
  return a - b;
}

}  // namespace windlab
