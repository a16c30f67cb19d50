#include "demagkit/expm.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace demagkit {

namespace {

constexpr double kBreakdown = 1e-14;

// Lanczos recurrence for a symmetric operator. With `coeffs` set, the basis
// is regenerated and sum_j coeffs[j] q_j is accumulated into `x`; running the
// identical recurrence twice keeps the memory at three vectors.
int lanczos_sweep(const LinearOperator& op, const Eigen::VectorXd& f, int k,
                  std::vector<double>& alpha, std::vector<double>& beta,
                  const Eigen::VectorXd* coeffs, Eigen::VectorXd* x) {
  const double fnorm = f.norm();
  Eigen::VectorXd q = f / fnorm;
  Eigen::VectorXd q_prev = Eigen::VectorXd::Zero(f.size());
  Eigen::VectorXd w(f.size());
  double b_prev = 0.0;
  double anorm = 0.0;
  alpha.clear();
  beta.clear();
  int done = 0;
  for (int j = 0; j < k; ++j) {
    if (coeffs) x->noalias() += (*coeffs)[j] * q;
    op.apply(q, w);
    anorm = std::max(anorm, w.norm());
    const double a = q.dot(w);
    w.noalias() -= a * q;
    w.noalias() -= b_prev * q_prev;
    const double b = w.norm();
    alpha.push_back(a);
    done = j + 1;
    if (j + 1 == k || b < kBreakdown * anorm) break;
    beta.push_back(b);
    q_prev.swap(q);
    q = w / b;
    b_prev = b;
  }
  return done;
}

}  // namespace

ArnoldiDecomposition arnoldi(const LinearOperator& op, const Eigen::VectorXd& f, int k) {
  if (k < 1) throw std::invalid_argument("arnoldi: k must be at least 1");
  if (static_cast<std::size_t>(f.size()) != op.dim) {
    throw std::invalid_argument("arnoldi: start vector does not match operator dimension");
  }
  const double beta = f.norm();
  if (!(beta > 0.0)) throw std::invalid_argument("arnoldi: start vector is identically zero");

  ArnoldiDecomposition d;
  const Eigen::Index n = f.size();
  const int kk = static_cast<int>(std::min<Eigen::Index>(k, n));
  d.truncated = kk < k;
  d.beta = beta;

  Eigen::MatrixXd Q(n, kk + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(kk + 1, kk);
  Q.col(0) = f / beta;
  Eigen::VectorXd w(n);
  double anorm = 0.0;
  int done = kk;
  for (int j = 0; j < kk; ++j) {
    op.apply(Q.col(j), w);
    anorm = std::max(anorm, w.norm());
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const double h = Q.col(i).dot(w);
        H(i, j) += h;
        w.noalias() -= h * Q.col(i);
      }
    }
    const double hn = w.norm();
    H(j + 1, j) = hn;
    if (hn < kBreakdown * anorm) {
      done = j + 1;
      d.breakdown = true;
      break;
    }
    Q.col(j + 1) = w / hn;
  }
  d.Q = Q.leftCols(done);
  d.H = H.topLeftCorner(done, done);
  if (d.breakdown) {
    d.next_coupling = 0.0;
    d.next_vector = Eigen::VectorXd::Zero(n);
  } else {
    d.next_coupling = H(done, done - 1);
    d.next_vector = Q.col(done);
  }
  return d;
}

ArnoldiDecomposition arnoldi(const LinearOperator& op, const ScalarField& f, int k) {
  return arnoldi(op, interior_vector(f), k);
}

Eigen::MatrixXd expm_small(const Eigen::MatrixXd& A, int cap) {
  if (A.rows() != A.cols()) throw std::invalid_argument("expm_small: matrix must be square");
  if (A.rows() > cap) throw std::invalid_argument("expm_small: matrix exceeds the size cap");
  if (!A.allFinite()) throw std::invalid_argument("expm_small: non-finite entries");
  const Eigen::Index n = A.rows();
  if (n == 0) return A;

  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  const Eigen::MatrixXd X = A / std::ldexp(1.0, s);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd X2 = X * X;
  const Eigen::MatrixXd X4 = X2 * X2;
  const Eigen::MatrixXd X6 = X4 * X2;
  Eigen::MatrixXd inner = b[13] * X6 + b[11] * X4 + b[9] * X2;
  Eigen::MatrixXd tmp = X6 * inner;
  tmp += b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * I;
  const Eigen::MatrixXd U = X * tmp;
  inner = b[12] * X6 + b[10] * X4 + b[8] * X2;
  Eigen::MatrixXd V = X6 * inner;
  V += b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * I;

  Eigen::MatrixXd E = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

Eigen::VectorXd krylov_expm_action(const LinearOperator& op, const Eigen::VectorXd& f,
                                   const KrylovOptions& opts) {
  if (opts.max_dim < 1) throw std::invalid_argument("krylov_expm_action: max_dim must be positive");
  const double fnorm = f.norm();
  if (fnorm == 0.0) return Eigen::VectorXd::Zero(f.size());
  const int k = static_cast<int>(std::min<Eigen::Index>(opts.max_dim, f.size()));

  KrylovMode mode = opts.mode;
  if (mode == KrylovMode::automatic) {
    const double work = static_cast<double>(f.size()) * k * static_cast<double>(k);
    mode = work <= opts.lanczos_threshold ? KrylovMode::arnoldi : KrylovMode::lanczos;
  }

  if (mode == KrylovMode::arnoldi) {
    const ArnoldiDecomposition d = arnoldi(op, f, k);
    const Eigen::MatrixXd E = expm_small(-d.H);
    return d.beta * (d.Q * E.col(0));
  }

  std::vector<double> alpha, beta;
  const int done = lanczos_sweep(op, f, k, alpha, beta, nullptr, nullptr);
  Eigen::MatrixXd Tk = Eigen::MatrixXd::Zero(done, done);
  for (int j = 0; j < done; ++j) {
    Tk(j, j) = alpha[j];
    if (j + 1 < done) Tk(j, j + 1) = Tk(j + 1, j) = beta[j];
  }
  const Eigen::VectorXd coeffs = fnorm * expm_small(-Tk).col(0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.size());
  lanczos_sweep(op, f, done, alpha, beta, &coeffs, &x);
  return x;
}

ScalarField expm_action(double T, const ScalarField& f, const KrylovOptions& opts) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("expm_action: T must be >= 0");
  if (T == 0.0) return f;
  const NegLaplacian lap(f.grid());
  const Eigen::VectorXd x = krylov_expm_action(lap.as_operator(T), interior_vector(f), opts);
  return from_interior(f.grid(), x);
}

ScalarField expm_action(double T, const ScalarField& f, int k) {
  KrylovOptions opts;
  opts.max_dim = k;
  return expm_action(T, f, opts);
}

}  // namespace demagkit
