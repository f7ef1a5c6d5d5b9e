#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "rotpend/control.hpp"
#include "rotpend/errors.hpp"

namespace rotpend {

namespace {

// Position of P(i, j), i ≤ j, in the packed upper triangle.
Eigen::Index packed_index(Eigen::Index i, Eigen::Index j, Eigen::Index n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::string format_complex(std::complex<double> z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "j";
  return os.str();
}

}  // namespace

Eigen::MatrixXd companion_matrix(std::span<const double> K) {
  const auto n = static_cast<Eigen::Index>(K.size());
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "companion_matrix: empty K");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) A(n - 1, j) = -K[static_cast<std::size_t>(n - 1 - j)];
  return A;
}

double error_feedback(std::span<const double> K, const Eigen::VectorXd& e_vec) {
  const std::size_t n = K.size();
  if (static_cast<std::size_t>(e_vec.size()) != n) {
    throw Error(ErrorKind::kInvalidArgument, "error vector length does not match K");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += K[n - 1 - i] * e_vec[static_cast<Eigen::Index>(i)];
  }
  return acc;
}

std::complex<double> rightmost_eigenvalue(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericalFailure, "eigenvalue computation failed");
  }
  const auto& ev = es.eigenvalues();
  std::complex<double> best = ev[0];
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    // Prefer the upper member of a conjugate pair for a stable report.
    if (ev[i].real() > best.real() ||
        (ev[i].real() == best.real() && ev[i].imag() > best.imag())) {
      best = ev[i];
    }
  }
  return best;
}

double inf_norm(const Eigen::MatrixXd& M) {
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P,
                         const Eigen::MatrixXd& Q) {
  return inf_norm(A.transpose() * P + P * A + Q);
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  if (n == 0 || A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorKind::kInvalidArgument, "solve_lyapunov: A and Q must be n×n");
  }
  if (!A.allFinite() || !Q.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "solve_lyapunov: non-finite input");
  }
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * inf_norm(Q)) {
    throw Error(ErrorKind::kInvalidArgument, "solve_lyapunov: Q is not symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(Q).info() != Eigen::Success) {
    throw Error(ErrorKind::kInvalidArgument,
                "solve_lyapunov: Q is not positive definite");
  }

  const auto lead = rightmost_eigenvalue(A);
  if (lead.real() >= 0.0) {
    throw NotHurwitzError(lead, "A is not Hurwitz (eigenvalue " +
                                    format_complex(lead) +
                                    "); AᵀP + PA = −Q has no positive definite solution");
  }

  // Row r ↔ equation (i, j), i ≤ j; column c ↔ unknown P(k, l), k ≤ l.
  //   (AᵀP)_ij = Σ_k A_ki P_kj,   (PA)_ij = Σ_k P_ik A_kj.
  const Eigen::Index m = n * (n + 1) / 2;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Eigen::Index r = packed_index(i, j, n);
      for (Eigen::Index k = 0; k < n; ++k) {
        M(r, packed_index(k, j, n)) += A(k, i);
        M(r, packed_index(i, k, n)) += A(k, j);
      }
    }
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::kNumericalFailure,
                "solve_lyapunov: singular symmetric-entry system");
  }

  auto unpack = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        P(i, j) = P(j, i) = p[packed_index(i, j, n)];
      }
    }
    return P;
  };
  auto pack_upper = [&](const Eigen::MatrixXd& S) {
    Eigen::VectorXd v(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) v[packed_index(i, j, n)] = S(i, j);
    }
    return v;
  };

  Eigen::MatrixXd P = unpack(lu.solve(pack_upper(-Q)));

  // Iterative refinement on the same factorization.
  const double tol = 1e-8 * inf_norm(Q);
  for (int iter = 0; iter < 3; ++iter) {
    const Eigen::MatrixXd R = A.transpose() * P + P * A + Q;
    if (inf_norm(R) <= 1e-3 * tol) break;
    P += unpack(lu.solve(pack_upper(-R)));
  }

  if (!P.allFinite() || lyapunov_residual(A, P, Q) > tol) {
    throw Error(ErrorKind::kNumericalFailure,
                "solve_lyapunov: residual bound not met (ill-conditioned A)");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(P).info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericalFailure,
                "solve_lyapunov: solution is not positive definite");
  }
  return P;
}

}  // namespace rotpend
