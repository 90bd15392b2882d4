#include "graphda/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace graphda {

LpProblem LpProblem::with_variables(Index n) {
  if (n < 0) throw std::invalid_argument("negative variable count");
  LpProblem p;
  p.cost.assign(static_cast<std::size_t>(n), 0.0);
  p.lower.assign(static_cast<std::size_t>(n), 0.0);
  p.upper.assign(static_cast<std::size_t>(n), kInf);
  return p;
}

void LpProblem::validate() const {
  const std::size_t n = cost.size();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("bound vectors must match the cost length");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(cost[j])) throw std::invalid_argument("non-finite cost");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInf || upper[j] == -kInf) {
      throw std::invalid_argument("invalid bounds for variable " + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& row = constraints[i];
    if (std::isnan(row.lower) || std::isnan(row.upper) || row.lower > row.upper ||
        row.lower == kInf || row.upper == -kInf) {
      throw std::invalid_argument("invalid bounds for constraint " + std::to_string(i));
    }
    for (const auto& t : row.terms) {
      if (t.var < 0 || static_cast<std::size_t>(t.var) >= n) {
        throw std::invalid_argument("constraint " + std::to_string(i) +
                                    " references a missing variable");
      }
      if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite constraint coefficient");
    }
  }
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

double lp_objective(const LpProblem& problem, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < problem.cost.size(); ++j) s += problem.cost[j] * x[j];
  return s;
}

double max_violation(const LpProblem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < problem.cost.size(); ++j) {
    worst = std::max({worst, problem.lower[j] - x[j], x[j] - problem.upper[j]});
  }
  for (const auto& row : problem.constraints) {
    double a = 0.0;
    for (const auto& t : row.terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
    worst = std::max({worst, row.lower - a, a - row.upper});
  }
  return worst;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Place { Basic, Lower, Upper, Free };

struct Entry {
  Index row;
  double value;
};

// Columns: n structurals, then one slack per row (s_i = a_i . x, carrying
// the row bounds), then artificials for rows whose initial residual is
// nonzero. Every row reads  a_i . x - s_i + sign * art_i = 0.
class Simplex {
 public:
  Simplex(const LpProblem& p, const LpOptions& o) : opt_(o) {
    n_ = p.variable_count();
    m_ = static_cast<Index>(p.constraints.size());
    cols_.resize(static_cast<std::size_t>(n_ + m_));
    for (Index i = 0; i < m_; ++i) {
      // Merge duplicate terms so every column holds one entry per row.
      std::vector<LpTerm> terms = p.constraints[static_cast<std::size_t>(i)].terms;
      std::sort(terms.begin(), terms.end(),
                [](const LpTerm& a, const LpTerm& b) { return a.var < b.var; });
      for (std::size_t k = 0; k < terms.size();) {
        double v = 0.0;
        const Index var = terms[k].var;
        for (; k < terms.size() && terms[k].var == var; ++k) v += terms[k].coef;
        if (v != 0.0) col(var).push_back({i, v});
      }
      col(n_ + i).push_back({i, -1.0});
    }
    lb_ = p.lower;
    ub_ = p.upper;
    for (const auto& row : p.constraints) {
      lb_.push_back(row.lower);
      ub_.push_back(row.upper);
    }
    cost_ = p.cost;
    cost_.resize(static_cast<std::size_t>(n_ + m_), 0.0);

    x_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    place_.assign(static_cast<std::size_t>(n_ + m_), Place::Lower);
    for (Index j = 0; j < n_; ++j) place_nonbasic(j, cost_[static_cast<std::size_t>(j)]);

    // Slacks start basic when their row value is inside the row bounds,
    // otherwise they sit at the nearest bound and an artificial absorbs the gap.
    std::vector<double> activity(static_cast<std::size_t>(m_), 0.0);
    for (Index j = 0; j < n_; ++j) {
      for (const auto& e : col(j)) activity[static_cast<std::size_t>(e.row)] += e.value * xv(j);
    }
    basis_.assign(static_cast<std::size_t>(m_), -1);
    std::vector<double> diag(static_cast<std::size_t>(m_), -1.0);
    for (Index i = 0; i < m_; ++i) {
      const Index s = n_ + i;
      const double a = activity[static_cast<std::size_t>(i)];
      const double lo = lb_[static_cast<std::size_t>(s)];
      const double up = ub_[static_cast<std::size_t>(s)];
      if (a >= lo && a <= up) {
        basis_[static_cast<std::size_t>(i)] = s;
        place_[static_cast<std::size_t>(s)] = Place::Basic;
        x_[static_cast<std::size_t>(s)] = a;
        continue;
      }
      const double target = a < lo ? lo : up;
      x_[static_cast<std::size_t>(s)] = target;
      place_[static_cast<std::size_t>(s)] = a < lo ? Place::Lower : Place::Upper;
      // a - target + sign * art = 0 with art > 0.
      const double sign = a < target ? 1.0 : -1.0;
      const Index art = static_cast<Index>(cols_.size());
      cols_.push_back({{i, sign}});
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      cost_.push_back(0.0);
      x_.push_back(std::abs(target - a));
      place_.push_back(Place::Basic);
      basis_[static_cast<std::size_t>(i)] = art;
      diag[static_cast<std::size_t>(i)] = sign;
    }
    total_ = static_cast<Index>(cols_.size());
    binv_ = RowMatrix::Zero(m_, m_);
    for (Index i = 0; i < m_; ++i) binv_(i, i) = 1.0 / diag[static_cast<std::size_t>(i)];
  }

  LpSolution run() {
    LpSolution out;
    const Index first_art = n_ + m_;
    if (total_ > first_art) {
      std::vector<double> phase1(static_cast<std::size_t>(total_), 0.0);
      for (Index j = first_art; j < total_; ++j) phase1[static_cast<std::size_t>(j)] = 1.0;
      const bool bounded = iterate(phase1);
      (void)bounded;  // phase one is bounded below by zero
      refactor();
      double infeas = 0.0;
      for (Index j = first_art; j < total_; ++j) infeas += xv(j);
      double scale = 1.0;
      for (Index i = 0; i < m_; ++i) {
        const Index s = n_ + i;
        for (double b : {lb_[static_cast<std::size_t>(s)], ub_[static_cast<std::size_t>(s)]}) {
          if (std::isfinite(b)) scale = std::max(scale, std::abs(b));
        }
      }
      if (infeas > opt_.feasibility_tol * scale) {
        out.status = LpStatus::Infeasible;
        out.x = structurals();
        out.objective = structural_objective();
        out.iterations = iterations_;
        return out;
      }
      for (Index j = first_art; j < total_; ++j) {
        ub_[static_cast<std::size_t>(j)] = 0.0;
        if (place_[static_cast<std::size_t>(j)] != Place::Basic) {
          place_[static_cast<std::size_t>(j)] = Place::Lower;
          x_[static_cast<std::size_t>(j)] = 0.0;
        }
      }
      drive_out_artificials(first_art);
    }
    const bool bounded = iterate(cost_);
    refactor();
    out.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
    out.x = structurals();
    if (bounded) {
      for (Index j = 0; j < n_; ++j) {
        auto& v = out.x[static_cast<std::size_t>(j)];
        v = std::clamp(v, lb_[static_cast<std::size_t>(j)], ub_[static_cast<std::size_t>(j)]);
      }
    }
    out.objective = structural_objective(out.x);
    out.iterations = iterations_;
    return out;
  }

 private:
  std::vector<Entry>& col(Index j) { return cols_[static_cast<std::size_t>(j)]; }
  const std::vector<Entry>& col(Index j) const { return cols_[static_cast<std::size_t>(j)]; }
  double xv(Index j) const { return x_[static_cast<std::size_t>(j)]; }

  void place_nonbasic(Index j, double c) {
    const double lo = lb_[static_cast<std::size_t>(j)];
    const double up = ub_[static_cast<std::size_t>(j)];
    Place where;
    if (std::isfinite(lo) && (c >= 0.0 || !std::isfinite(up))) {
      where = Place::Lower;
    } else if (std::isfinite(up)) {
      where = Place::Upper;
    } else {
      where = Place::Free;
    }
    place_[static_cast<std::size_t>(j)] = where;
    x_[static_cast<std::size_t>(j)] =
        where == Place::Lower ? lo : (where == Place::Upper ? up : 0.0);
  }

  std::vector<double> structurals() const {
    return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_)};
  }
  double structural_objective() const { return structural_objective(structurals()); }
  double structural_objective(const std::vector<double>& x) const {
    double s = 0.0;
    for (Index j = 0; j < n_; ++j) s += cost_[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    return s;
  }

  // Rebuilds B^{-1} and the basic values from the nonbasic ones.
  void refactor() {
    if (m_ == 0) return;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (Index r = 0; r < m_; ++r) {
      for (const auto& e : col(basis_[static_cast<std::size_t>(r)])) b(e.row, r) = e.value;
    }
    binv_ = Eigen::PartialPivLU<Eigen::MatrixXd>(b).inverse();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (Index j = 0; j < total_; ++j) {
      if (place_[static_cast<std::size_t>(j)] == Place::Basic) continue;
      const double v = xv(j);
      if (v == 0.0) continue;
      for (const auto& e : col(j)) rhs(e.row) -= e.value * v;
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (Index r = 0; r < m_; ++r) x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = xb(r);
    updates_ = 0;
  }

  Eigen::VectorXd ftran(Index j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
    for (const auto& e : col(j)) a += binv_.col(e.row) * e.value;
    return a;
  }

  void pivot(Index r, Index q, const Eigen::VectorXd& alpha) {
    const double piv = alpha(r);
    binv_.row(r) /= piv;
    const Eigen::RowVectorXd pr = binv_.row(r);
    for (Index i = 0; i < m_; ++i) {
      if (i != r && alpha(i) != 0.0) binv_.row(i).noalias() -= alpha(i) * pr;
    }
    place_[static_cast<std::size_t>(q)] = Place::Basic;
    basis_[static_cast<std::size_t>(r)] = q;
    if (++updates_ >= opt_.refactor_interval) refactor();
  }

  // After phase one, swaps basic artificials (now at zero) for any nonbasic
  // non-artificial column with a usable pivot in their row. Rows where none
  // exists are redundant and keep their artificial fixed at zero.
  void drive_out_artificials(Index first_art) {
    for (Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < first_art) continue;
      const Eigen::RowVectorXd row = binv_.row(r);
      Index best = -1;
      double best_mag = 1e-7;
      for (Index j = 0; j < first_art; ++j) {
        if (place_[static_cast<std::size_t>(j)] == Place::Basic) continue;
        double v = 0.0;
        for (const auto& e : col(j)) v += row(e.row) * e.value;
        if (std::abs(v) > best_mag) {
          best_mag = std::abs(v);
          best = j;
        }
      }
      if (best < 0) continue;
      const Index leaving = basis_[static_cast<std::size_t>(r)];
      const Eigen::VectorXd alpha = ftran(best);
      // Degenerate exchange: the artificial is at zero, so no value moves.
      place_[static_cast<std::size_t>(leaving)] = Place::Lower;
      x_[static_cast<std::size_t>(leaving)] = 0.0;
      pivot(r, best, alpha);
      ++iterations_;
    }
    refactor();
  }

  // Runs simplex pivots for cost vector c. Returns false when unbounded.
  bool iterate(const std::vector<double>& c) {
    const Index limit = 50 * (total_ + m_) + 1000;
    Index stall = 0;
    bool bland = false;
    Eigen::VectorXd cb(m_);
    Eigen::VectorXd y(m_);
    bool basis_changed = true;
    for (Index iter = 0;; ++iter) {
      if (iter > limit) throw Error("simplex iteration limit exceeded");
      // Bound flips leave the basis, and with it the duals, unchanged.
      if (basis_changed) {
        for (Index r = 0; r < m_; ++r) cb(r) = c[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
        y.noalias() = binv_.transpose() * cb;
        basis_changed = false;
      }

      // Pricing.
      Index q = -1;
      double q_dir = 0.0;
      double q_score = 0.0;
      for (Index j = 0; j < total_; ++j) {
        const Place where = place_[static_cast<std::size_t>(j)];
        if (where == Place::Basic) continue;
        if (lb_[static_cast<std::size_t>(j)] == ub_[static_cast<std::size_t>(j)]) continue;
        double d = c[static_cast<std::size_t>(j)];
        for (const auto& e : col(j)) d -= y(e.row) * e.value;
        double dir = 0.0;
        if (where == Place::Lower && d < -opt_.optimality_tol) dir = 1.0;
        else if (where == Place::Upper && d > opt_.optimality_tol) dir = -1.0;
        else if (where == Place::Free && std::abs(d) > opt_.optimality_tol) dir = d < 0.0 ? 1.0 : -1.0;
        if (dir == 0.0) continue;
        if (bland) {
          q = j;
          q_dir = dir;
          break;
        }
        if (std::abs(d) > q_score) {
          q_score = std::abs(d);
          q = j;
          q_dir = dir;
        }
      }
      if (q < 0) return true;

      const Eigen::VectorXd alpha = ftran(q);
      // Ratio test; x_B moves by -dir * theta * alpha.
      double theta = kInf;
      Index leave = -1;
      double leave_rate = 0.0;
      for (Index r = 0; r < m_; ++r) {
        const double rate = q_dir * alpha(r);
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        const Index b = basis_[static_cast<std::size_t>(r)];
        const double v = xv(b);
        double t;
        if (rate > 0.0) {
          const double lo = lb_[static_cast<std::size_t>(b)];
          if (!std::isfinite(lo)) continue;
          t = std::max(0.0, (v - lo) / rate);
        } else {
          const double up = ub_[static_cast<std::size_t>(b)];
          if (!std::isfinite(up)) continue;
          t = std::max(0.0, (up - v) / -rate);
        }
        bool take = false;
        if (leave < 0 || t < theta - 1e-12) {
          take = true;
        } else if (t <= theta + 1e-12) {
          take = bland ? b < basis_[static_cast<std::size_t>(leave)]
                       : std::abs(rate) > std::abs(leave_rate);
        }
        if (take) {
          theta = std::min(theta, t);
          leave = r;
          leave_rate = rate;
        }
      }
      const double range = ub_[static_cast<std::size_t>(q)] - lb_[static_cast<std::size_t>(q)];
      const bool flip = std::isfinite(range) && (leave < 0 || range <= theta);
      if (flip) theta = range;
      if (!std::isfinite(theta)) return false;

      ++iterations_;
      if (theta <= 1e-12) {
        if (++stall >= opt_.stall_limit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }

      x_[static_cast<std::size_t>(q)] += q_dir * theta;
      for (Index r = 0; r < m_; ++r) {
        x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] -= q_dir * theta * alpha(r);
      }
      if (flip) {
        const bool to_upper = q_dir > 0.0;
        place_[static_cast<std::size_t>(q)] = to_upper ? Place::Upper : Place::Lower;
        x_[static_cast<std::size_t>(q)] = to_upper ? ub_[static_cast<std::size_t>(q)] : lb_[static_cast<std::size_t>(q)];
        continue;
      }
      const Index out = basis_[static_cast<std::size_t>(leave)];
      const bool at_lower = leave_rate > 0.0;
      place_[static_cast<std::size_t>(out)] = at_lower ? Place::Lower : Place::Upper;
      x_[static_cast<std::size_t>(out)] = at_lower ? lb_[static_cast<std::size_t>(out)] : ub_[static_cast<std::size_t>(out)];
      pivot(leave, q, alpha);
      basis_changed = true;
    }
  }

  LpOptions opt_;
  Index n_ = 0;
  Index m_ = 0;
  Index total_ = 0;
  std::vector<std::vector<Entry>> cols_;
  std::vector<double> lb_, ub_, cost_, x_;
  std::vector<Place> place_;
  std::vector<Index> basis_;
  RowMatrix binv_;
  Index updates_ = 0;
  Index iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  Simplex simplex(problem, options);
  return simplex.run();
}

}  // namespace graphda
