#include "core/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace becmirror {

void FockDensityMatrix::validate() const {
  if (n_modes != 1 && n_modes != 2)
    throw InvalidArgument("fock state must have 1 or 2 modes");
  const Eigen::Index d = n_modes == 1 ? dim : (Eigen::Index)dim * dim;
  if (rho.rows() != d || rho.cols() != d)
    throw InvalidArgument("fock density matrix has inconsistent dimensions");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("fock density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 ||
      std::abs(rho.trace().imag()) > 1e-10)
    throw InvalidArgument("fock density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw InvalidArgument("fock density matrix is not positive semidefinite");
}

FockDensityMatrix FockDensityMatrix::from_pure(const VectorXcd& psi,
                                               int n_modes, int dim) {
  FockDensityMatrix r;
  r.n_modes = n_modes;
  r.dim = dim;
  r.rho = psi * psi.adjoint();
  return r;
}

VectorXcd cat_state_fock(double alpha, int dim) {
  const double bound = alpha * alpha + 7.0 * std::abs(alpha) + 10.0;
  if (dim < bound)
    throw SizeError("cat_state_fock: truncation too small for requested alpha");
  VectorXcd psi = VectorXcd::Zero(dim);
  double term = 1.0;  // alpha^n / sqrt(n!)
  for (int n = 0; n < dim; ++n) {
    if (n > 0) term *= alpha / std::sqrt((double)n);
    if (n % 2 == 0) psi(n) = term;
  }
  psi.normalize();
  return psi;
}

VectorXcd coherent_state_fock(std::complex<double> alpha, int dim) {
  VectorXcd psi(dim);
  std::complex<double> term = 1.0;
  for (int n = 0; n < dim; ++n) {
    if (n > 0) term *= alpha / std::sqrt((double)n);
    psi(n) = term;
  }
  psi.normalize();
  return psi;
}

VectorXcd tensor_product(const VectorXcd& psi_m, const VectorXcd& psi_2) {
  const int dm = (int)psi_m.size(), d2 = (int)psi_2.size();
  if (dm != d2) throw InvalidArgument("tensor_product: equal truncations required");
  VectorXcd out(dm * d2);
  for (int a = 0; a < dm; ++a)
    for (int b = 0; b < d2; ++b) out(a * d2 + b) = psi_m(a) * psi_2(b);
  return out;
}

MatrixXcd beamsplitter_unitary(int dim, double theta, int dim_cap) {
  if (dim < 2) throw InvalidArgument("beamsplitter_unitary: dim must be >= 2");
  if (dim > dim_cap)
    throw SizeError("beamsplitter_unitary: dim exceeds the memory cap");
  const int d2 = dim * dim;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(d2, d2);
  auto idx = [dim](int nm, int n2) { return nm * dim + n2; };
  for (int nm = 0; nm < dim; ++nm)
    for (int n2 = 0; n2 < dim; ++n2) {
      // c_m^dag c_2 |nm, n2> and c_2^dag c_m |nm, n2>
      if (nm + 1 < dim && n2 >= 1)
        gen(idx(nm + 1, n2 - 1), idx(nm, n2)) +=
            std::sqrt((double)(nm + 1) * n2);
      if (nm >= 1 && n2 + 1 < dim)
        gen(idx(nm - 1, n2 + 1), idx(nm, n2)) +=
            std::sqrt((double)nm * (n2 + 1));
    }
  MatrixXcd a = std::complex<double>(0.0, -theta) * gen.cast<std::complex<double>>();
  return a.exp();
}

FockDensityMatrix conjugate(const FockDensityMatrix& rho, const MatrixXcd& u) {
  FockDensityMatrix out = rho;
  out.rho = u * rho.rho * u.adjoint();
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  return out;
}

FockDensityMatrix evolve_beamsplitter(const FockDensityMatrix& rho,
                                      double theta, int dim_cap) {
  if (rho.n_modes != 2)
    throw InvalidArgument("evolve_beamsplitter needs a two-mode state");
  return conjugate(rho, beamsplitter_unitary(rho.dim, theta, dim_cap));
}

FockDensityMatrix partial_trace(const FockDensityMatrix& rho, int keep_mode) {
  if (rho.n_modes != 2)
    throw InvalidArgument("partial_trace needs a two-mode state");
  if (keep_mode != 0 && keep_mode != 1)
    throw InvalidArgument("partial_trace: keep_mode must be 0 (mirror) or 1 (side mode)");
  const int d = rho.dim;
  FockDensityMatrix out;
  out.n_modes = 1;
  out.dim = d;
  out.rho = MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      std::complex<double> s = 0.0;
      if (keep_mode == 0) {
        for (int k = 0; k < d; ++k) s += rho.rho(a * d + k, b * d + k);
      } else {
        for (int k = 0; k < d; ++k) s += rho.rho(k * d + a, k * d + b);
      }
      out.rho(a, b) = s;
    }
  return out;
}

double mean_occupation(const FockDensityMatrix& rho, int mode) {
  double n = 0.0;
  if (rho.n_modes == 1) {
    for (int k = 0; k < rho.dim; ++k) n += k * rho.rho(k, k).real();
    return n;
  }
  const int d = rho.dim;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double occ = mode == 0 ? a : b;
      n += occ * rho.rho(a * d + b, a * d + b).real();
    }
  return n;
}

namespace {

// Left-multiplication by mode ladder operators on a two-mode matrix.
// mode 0 = mirror (major index), mode 1 = side mode (minor index).
MatrixXcd apply_annihilation(const MatrixXcd& m, int dim, int mode) {
  MatrixXcd out = MatrixXcd::Zero(m.rows(), m.cols());
  const int stride = mode == 0 ? dim : 1;
  const int d2 = dim * dim;
  for (int r = 0; r < d2; ++r) {
    const int n = mode == 0 ? r / dim : r % dim;
    if (n + 1 < dim)
      out.row(r) = std::sqrt((double)(n + 1)) * m.row(r + stride);
  }
  return out;
}

MatrixXcd apply_creation(const MatrixXcd& m, int dim, int mode) {
  MatrixXcd out = MatrixXcd::Zero(m.rows(), m.cols());
  const int stride = mode == 0 ? dim : 1;
  const int d2 = dim * dim;
  for (int r = 0; r < d2; ++r) {
    const int n = mode == 0 ? r / dim : r % dim;
    if (n >= 1) out.row(r) = std::sqrt((double)n) * m.row(r - stride);
  }
  return out;
}

// Quadrature index order (x_2, p_2, x_m, p_m).
MatrixXcd apply_quadrature(const MatrixXcd& m, int dim, int quad) {
  const int mode = quad < 2 ? 1 : 0;
  MatrixXcd a = apply_annihilation(m, dim, mode);
  MatrixXcd c = apply_creation(m, dim, mode);
  if (quad % 2 == 0) return a + c;                       // x = c + c^dag
  return std::complex<double>(0.0, 1.0) * (c - a);       // p = i (c^dag - c)
}

}  // namespace

QuadratureState quadrature_moments(const FockDensityMatrix& rho) {
  if (rho.n_modes != 2)
    throw InvalidArgument("quadrature_moments needs a two-mode state");
  const int d = rho.dim;
  QuadratureState s;
  MatrixXcd zrho[4];
  for (int i = 0; i < 4; ++i) {
    zrho[i] = apply_quadrature(rho.rho, d, i);
    s.mean(i) = zrho[i].trace().real();
  }
  Mat4 second;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      second(i, j) = apply_quadrature(zrho[j], d, i).trace().real();
  Mat4 cov = second - s.mean * s.mean.transpose();
  s.cov = 0.5 * (cov + cov.transpose());
  return s;
}

WignerGrid wigner_from_fock(const FockDensityMatrix& rho, const GridSpec& g,
                            bool* truncation_warning) {
  if (rho.n_modes != 1)
    throw InvalidArgument("wigner_from_fock needs a one-mode state");
  g.validate();
  const int d = rho.dim;
  const double extent =
      std::min(std::max(std::abs(g.x_min), std::abs(g.x_max)),
               std::max(std::abs(g.p_min), std::abs(g.p_max)));
  if (truncation_warning)
    *truncation_warning = extent < 2.0 * std::sqrt((double)d);

  WignerGrid out;
  out.spec = g;
  out.w.resize((size_t)g.n_x * g.n_p);

  std::vector<double> inv_sqrt_fact(d, 1.0);  // 1 / sqrt(k!)
  for (int k = 1; k < d; ++k)
    inv_sqrt_fact[k] = inv_sqrt_fact[k - 1] / std::sqrt((double)k);

  for (int i = 0; i < g.n_x; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.n_p; ++j) {
      const double p = g.p(j);
      const double u = x * x + p * p;         // 4 |alpha|^2
      const std::complex<double> beta(x, p);  // 2 alpha
      double acc = 0.0;
      std::complex<double> beta_pow = 1.0;
      for (int k = 0; k < d; ++k) {
        if (k > 0) beta_pow *= beta;
        // L_m^k(u) by upward recurrence in m, with the sqrt(m!/(m+k)!) weight
        double lom = 0.0, lom1 = 1.0;        // L_{-1}, L_0
        double weight = inv_sqrt_fact[k];    // sqrt(m!/(m+k)!) at m = 0
        double sign = 1.0;
        for (int m = 0; m + k < d; ++m) {
          if (m > 0) {
            const double lnew =
                ((2.0 * (m - 1) + k + 1 - u) * lom1 - (m - 1 + k) * lom) / m;
            lom = lom1;
            lom1 = lnew;
            weight *= std::sqrt((double)m / (double)(m + k));
            sign = -sign;
          }
          const std::complex<double> rmn = rho.rho(m, m + k);
          if (k == 0)
            acc += sign * rmn.real() * lom1;
          else
            acc += 2.0 * sign * weight * (rmn * beta_pow).real() * lom1;
        }
      }
      out.at(i, j) = (0.5 / k_pi) * std::exp(-0.5 * u) * acc;
    }
  }
  return out;
}

}  // namespace becmirror
