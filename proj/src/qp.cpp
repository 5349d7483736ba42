// Copyright 2026 The alipmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "alipmpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alipmpc/errors.hpp"

namespace alipmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative threshold below which a new normal is treated as dependent on the
// working set.
constexpr double kDependentTol = 1e-12;

class DualActiveSet {
 public:
  DualActiveSet(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
      : f_(f), A_(A), b_(b), n_(static_cast<int>(f.size())) {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      throw InvalidArgument("solve_qp: Hessian is not positive definite");
    }
    Hinv_ = llt.solve(Eigen::MatrixXd::Identity(n_, n_));
    Hinv_ = 0.5 * (Hinv_ + Hinv_.transpose()).eval();
    HinvAt_ = Hinv_ * A_.transpose();
    x_ = -Hinv_ * f_;
  }

  // Direction for raising the multiplier of row p (inequality written as
  // -a_p^T x >= -b_p): primal step z and multiplier rate r on the working set.
  void direction(int p, Eigen::VectorXd& z, Eigen::VectorXd& r) const {
    const Eigen::VectorXd np_h = -HinvAt_.col(p);  // H^-1 n_p
    const int q = static_cast<int>(work_.size());
    if (q == 0) {
      z = np_h;
      r.resize(0);
      return;
    }
    Eigen::MatrixXd M(q, q);
    Eigen::VectorXd rhs(q);
    for (int i = 0; i < q; ++i) {
      const int wi = work_[static_cast<std::size_t>(i)];
      // n_wi^T H^-1 n_p with n = -a
      rhs[i] = A_.row(wi).dot(HinvAt_.col(p));
      for (int j = 0; j < q; ++j) {
        M(i, j) = A_.row(wi).dot(HinvAt_.col(work_[static_cast<std::size_t>(j)]));
      }
    }
    r = M.ldlt().solve(rhs);
    // z = H^-1 (n_p - N_W r) = -H^-1 a_p + sum_j r_j H^-1 a_wj
    z = np_h;
    for (int j = 0; j < q; ++j) {
      z += r[j] * HinvAt_.col(work_[static_cast<std::size_t>(j)]);
    }
  }

  bool dependent(int p, const Eigen::VectorXd& z) const {
    const double znp = -A_.row(p).dot(z);
    const double ref = A_.row(p).dot(HinvAt_.col(p));
    return znp <= kDependentTol * ref;
  }

  double slack(int i) const { return b_[i] - A_.row(i).dot(x_); }

  void drop(int k_pos) {
    work_.erase(work_.begin() + k_pos);
    lambda_.erase(lambda_.begin() + k_pos);
  }

  // Minimiser of the objective over the equality set 'work_'; multipliers
  // from the reduced KKT system.
  void solve_equality() {
    const int q = static_cast<int>(work_.size());
    if (q == 0) {
      x_ = -Hinv_ * f_;
      return;
    }
    Eigen::MatrixXd M(q, q);
    Eigen::VectorXd rhs(q);
    for (int i = 0; i < q; ++i) {
      const int wi = work_[static_cast<std::size_t>(i)];
      rhs[i] = -b_[wi] - A_.row(wi).dot(Hinv_ * f_);
      for (int j = 0; j < q; ++j) {
        M(i, j) = A_.row(wi).dot(HinvAt_.col(work_[static_cast<std::size_t>(j)]));
      }
    }
    // A_W x = b_W with x = -H^-1 (f + A_W^T lambda)
    const Eigen::VectorXd lam = M.ldlt().solve(rhs);
    x_ = -Hinv_ * f_;
    for (int j = 0; j < q; ++j) {
      lambda_[static_cast<std::size_t>(j)] = lam[j];
      x_ -= lam[j] * HinvAt_.col(work_[static_cast<std::size_t>(j)]);
    }
  }

  const Eigen::VectorXd& f_;
  const Eigen::MatrixXd& A_;
  const Eigen::VectorXd& b_;
  int n_;
  Eigen::MatrixXd Hinv_;
  Eigen::MatrixXd HinvAt_;
  Eigen::VectorXd x_;
  std::vector<int> work_;
  std::vector<double> lambda_;
};

}  // namespace

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kMaxIterations: return "max_iterations";
  }
  return "?";
}

KktResiduals kkt_residuals(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                           const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda) {
  KktResiduals res;
  const double b_scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  const Eigen::VectorXd Hx = H * x;
  Eigen::VectorXd Atl = Eigen::VectorXd::Zero(x.size());
  if (A.rows() > 0) {
    Atl = A.transpose() * lambda;
    const Eigen::VectorXd viol = A * x - b;
    res.primal = std::max(0.0, viol.maxCoeff()) / b_scale;
    const double lam_scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    res.complementarity =
        (lambda.array() * (b - A * x).array()).abs().maxCoeff() /
        (lam_scale * b_scale);
  }
  const double stat = (Hx + f + Atl).cwiseAbs().maxCoeff();
  const double neg = A.rows() > 0 ? std::max(0.0, -lambda.minCoeff()) : 0.0;
  const double d_scale =
      std::max({1.0, f.size() ? f.cwiseAbs().maxCoeff() : 0.0,
                Hx.size() ? Hx.cwiseAbs().maxCoeff() : 0.0,
                Atl.size() ? Atl.cwiseAbs().maxCoeff() : 0.0});
  res.dual = std::max(stat, neg) / d_scale;
  return res;
}

QpSolution solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                    const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    std::span<const int> warm_start, const QpOptions& options) {
  const int n = static_cast<int>(f.size());
  const int m = static_cast<int>(b.size());
  if (H.rows() != n || H.cols() != n || A.rows() != m || (m > 0 && A.cols() != n)) {
    throw InvalidArgument("solve_qp: dimension mismatch");
  }
  if (!H.allFinite() || !f.allFinite() || !A.allFinite() || !b.allFinite()) {
    throw InvalidArgument("solve_qp: non-finite data");
  }
  const Eigen::MatrixXd Aeff = m > 0 ? A : Eigen::MatrixXd(0, n);
  DualActiveSet s(H, f, Aeff, b);
  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations : 10 * (m + n) + 100;

  QpSolution sol;
  std::vector<char> in_work(static_cast<std::size_t>(m), 0);
  Eigen::VectorXd z;
  Eigen::VectorXd r;

  // Warm start: take the listed rows as equalities (skipping dependent ones),
  // then shed negative multipliers until the point is dual feasible.
  if (!warm_start.empty()) {
    for (int w : warm_start) {
      if (w < 0 || w >= m || in_work[static_cast<std::size_t>(w)]) continue;
      if (static_cast<int>(s.work_.size()) >= n) break;
      s.direction(w, z, r);
      if (s.dependent(w, z)) continue;
      s.work_.push_back(w);
      s.lambda_.push_back(0.0);
      in_work[static_cast<std::size_t>(w)] = 1;
    }
    for (;;) {
      s.solve_equality();
      auto it = std::min_element(s.lambda_.begin(), s.lambda_.end());
      if (it == s.lambda_.end() || *it >= 0.0) break;
      const auto pos = std::distance(s.lambda_.begin(), it);
      in_work[static_cast<std::size_t>(s.work_[static_cast<std::size_t>(pos)])] = 0;
      s.drop(static_cast<int>(pos));
    }
    sol.warm_started = !s.work_.empty();
  }

  int iter = 0;
  for (;;) {
    // most violated row, measured in the row's own units
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      if (in_work[static_cast<std::size_t>(i)]) continue;
      const double si = s.slack(i);
      const double tol = options.violation_tol * (1.0 + std::abs(b[i]));
      if (si < -tol) {
        const double norm = Aeff.row(i).norm();
        const double scaled = si / (norm > 0.0 ? norm : 1.0);
        if (scaled < worst) {
          worst = scaled;
          p = i;
        }
      }
    }
    if (p < 0) {
      sol.status = QpStatus::kOptimal;
      break;
    }

    double lambda_p = 0.0;
    bool added = false;
    while (!added) {
      if (++iter > max_iter) {
        sol.status = QpStatus::kMaxIterations;
        break;
      }
      s.direction(p, z, r);
      // blocking working-set multiplier
      double t1 = kInf;
      int k_pos = -1;
      for (int j = 0; j < static_cast<int>(s.work_.size()); ++j) {
        if (r[j] > 0.0) {
          const double ratio = s.lambda_[static_cast<std::size_t>(j)] / r[j];
          if (ratio < t1) {
            t1 = ratio;
            k_pos = j;
          }
        }
      }
      if (s.dependent(p, z)) {
        if (k_pos < 0) {
          sol.status = QpStatus::kInfeasible;
          sol.certificate = s.work_;
          sol.certificate.push_back(p);
          break;
        }
        for (int j = 0; j < static_cast<int>(s.work_.size()); ++j) {
          s.lambda_[static_cast<std::size_t>(j)] -= t1 * r[j];
        }
        lambda_p += t1;
        in_work[static_cast<std::size_t>(s.work_[static_cast<std::size_t>(k_pos)])] = 0;
        s.drop(k_pos);
        continue;
      }
      const double znp = -Aeff.row(p).dot(z);
      const double t2 = -s.slack(p) / znp;
      const double t = std::min(t1, t2);
      s.x_ += t * z;
      for (int j = 0; j < static_cast<int>(s.work_.size()); ++j) {
        s.lambda_[static_cast<std::size_t>(j)] -= t * r[j];
      }
      lambda_p += t;
      if (t2 <= t1) {
        s.work_.push_back(p);
        s.lambda_.push_back(lambda_p);
        in_work[static_cast<std::size_t>(p)] = 1;
        added = true;
      } else {
        in_work[static_cast<std::size_t>(s.work_[static_cast<std::size_t>(k_pos)])] = 0;
        s.drop(k_pos);
      }
    }
    if (!added) break;
  }

  sol.iterations = iter;
  sol.primal = s.x_;
  sol.multipliers = Eigen::VectorXd::Zero(m);
  for (std::size_t j = 0; j < s.work_.size(); ++j) {
    sol.multipliers[s.work_[j]] = std::max(0.0, s.lambda_[j]);
  }
  sol.active_set = s.work_;
  sol.objective = 0.5 * s.x_.dot(H * s.x_) + f.dot(s.x_);
  sol.residuals = kkt_residuals(H, f, Aeff, b, sol.primal, sol.multipliers);
  return sol;
}

QpSolution solve_qp(const QpProblem& qp, std::span<const int> warm_start,
                    const QpOptions& options) {
  return solve_qp(qp.hessian, qp.gradient, qp.constraints.matrix(),
                  qp.constraints.bounds(), warm_start, options);
}

}  // namespace alipmpc
