#include "miqubo/svr.hpp"

#include <limits>

#include "miqubo/error.hpp"

namespace miqubo {

void KernelParams::validate() const {
  if (kind == KernelKind::rbf && !(gamma > 0.0)) throw InputError("rbf kernel: gamma must be > 0");
}

namespace {

// The dual is written over 2l box variables beta. Entry t < l is alpha*_t
// (sign +1, linear term eps - z_t), entry t >= l is alpha_{t-l} (sign -1,
// linear term eps + z_t). The equality constraint becomes sum sign_t beta_t = 0
// and the Hessian is Q(s, t) = sign_s sign_t K(s mod l, t mod l).
class DualSolver {
 public:
  DualSolver(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& z, const SvrParams& p)
      : k_(kernel), l_(z.size()), c_(p.C), beta_(Eigen::VectorXd::Zero(2 * l_)),
        sign_(2 * l_), linear_(2 * l_) {
    for (Eigen::Index t = 0; t < l_; ++t) {
      sign_(t) = 1.0;
      sign_(t + l_) = -1.0;
      linear_(t) = p.epsilon - z(t);
      linear_(t + l_) = p.epsilon + z(t);
    }
    gradient_ = linear_;
  }

  double q(Eigen::Index s, Eigen::Index t) const {
    return sign_(s) * sign_(t) * k_(s % l_, t % l_);
  }

  bool in_up(Eigen::Index t) const { return sign_(t) > 0 ? beta_(t) < c_ : beta_(t) > 0.0; }
  bool in_low(Eigen::Index t) const { return sign_(t) > 0 ? beta_(t) > 0.0 : beta_(t) < c_; }

  /// Maximal violating pair; returns the violation m - M.
  double select(Eigen::Index& i, Eigen::Index& j) const {
    double m = -std::numeric_limits<double>::infinity();
    double big_m = std::numeric_limits<double>::infinity();
    i = j = -1;
    for (Eigen::Index t = 0; t < 2 * l_; ++t) {
      const double v = -sign_(t) * gradient_(t);
      if (in_up(t) && v > m) {
        m = v;
        i = t;
      }
      if (in_low(t) && v < big_m) {
        big_m = v;
        j = t;
      }
    }
    if (i < 0 || j < 0) return 0.0;
    return m - big_m;
  }

  void update(Eigen::Index i, Eigen::Index j) {
    constexpr double tau = 1e-12;
    const double old_i = beta_(i);
    const double old_j = beta_(j);
    double& ai = beta_(i);
    double& aj = beta_(j);
    const double qii = q(i, i), qjj = q(j, j), qij = q(i, j);

    if (sign_(i) != sign_(j)) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (-gradient_(i) - gradient_(j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c_) { ai = c_; aj = c_ - diff; }
      } else {
        if (aj > c_) { aj = c_; ai = c_ + diff; }
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (gradient_(i) - gradient_(j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) { ai = c_; aj = sum - c_; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c_) {
        if (aj > c_) { aj = c_; ai = sum - c_; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }

    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (Eigen::Index t = 0; t < 2 * l_; ++t) gradient_(t) += q(t, i) * di + q(t, j) * dj;
  }

  double objective() const { return 0.5 * beta_.dot(gradient_ + linear_); }

  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int free = 0;
    for (Eigen::Index t = 0; t < 2 * l_; ++t) {
      const double yg = sign_(t) * gradient_(t);
      if (beta_(t) >= c_) {
        if (sign_(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (beta_(t) <= 0.0) {
        if (sign_(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++free;
        sum += yg;
      }
    }
    return free > 0 ? sum / free : 0.5 * (ub + lb);
  }

  Eigen::VectorXd coefficients() const { return beta_.head(l_) - beta_.tail(l_); }

 private:
  const Eigen::MatrixXd& k_;
  Eigen::Index l_;
  double c_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd sign_;
  Eigen::VectorXd linear_;
  Eigen::VectorXd gradient_;
};

}  // namespace

SvrModel train_svr(const Eigen::MatrixXd& x, const Eigen::VectorXd& z, const SvrParams& p) {
  if (!(p.C > 0.0)) throw InputError("svr: C must be > 0");
  if (!(p.epsilon >= 0.0)) throw InputError("svr: epsilon must be >= 0");
  if (!(p.tol > 0.0)) throw InputError("svr: tol must be > 0");
  p.kernel.validate();
  if (x.rows() != z.size()) throw InputError("svr: row count does not match target length");
  if (x.rows() < 2) throw InputError("svr: need at least two samples");

  const Eigen::MatrixXd kernel = kernel_matrix(x, x, p.kernel);
  DualSolver solver(kernel, z, p);

  SvrModel m;
  m.params = p.kernel;
  m.C = p.C;
  m.epsilon = p.epsilon;
  if (p.record_objective) m.objective_history.push_back(solver.objective());

  Eigen::Index i = 0, j = 0;
  double violation = solver.select(i, j);
  while (violation >= p.tol) {
    if (m.iterations >= p.max_iterations)
      throw ConvergenceError("svr: no convergence after " + std::to_string(m.iterations) +
                                 " pair updates, KKT violation " + std::to_string(violation),
                             violation);
    solver.update(i, j);
    ++m.iterations;
    if (p.record_objective) m.objective_history.push_back(solver.objective());
    violation = solver.select(i, j);
  }
  m.final_violation = violation;

  const Eigen::VectorXd coefs = solver.coefficients();
  std::vector<Eigen::Index> support;
  for (Eigen::Index t = 0; t < coefs.size(); ++t)
    if (coefs(t) != 0.0) support.push_back(t);
  m.support_inputs.resize(static_cast<Eigen::Index>(support.size()), x.cols());
  m.dual_coefs.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t s = 0; s < support.size(); ++s) {
    m.support_inputs.row(static_cast<Eigen::Index>(s)) = x.row(support[s]);
    m.dual_coefs(static_cast<Eigen::Index>(s)) = coefs(support[s]);
  }
  m.bias = -solver.rho();
  return m;
}

Eigen::VectorXd predict(const SvrModel& m, const Eigen::MatrixXd& x) {
  if (x.cols() != m.support_inputs.cols())
    throw InputError("predict: input has " + std::to_string(x.cols()) + " columns, model expects " +
                     std::to_string(m.support_inputs.cols()));
  Eigen::VectorXd out = Eigen::VectorXd::Constant(x.rows(), m.bias);
  if (m.support_inputs.rows() == 0) return out;
  out += kernel_matrix(x, m.support_inputs, m.params) * m.dual_coefs;
  return out;
}

}  // namespace miqubo
