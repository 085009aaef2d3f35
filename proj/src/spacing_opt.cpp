#include "dronearray/spacing_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dronearray/csv.hpp"
#include "dronearray/errors.hpp"
#include "dronearray/parallel.hpp"

namespace dronearray::spacing {

using geom::SphDirection;

namespace {

// Grid accumulation shared by build_G and build_q. Rows are reduced in index
// order so the result does not depend on the worker count.
struct GqAccumulator {
  Eigen::MatrixXd G;
  Eigen::VectorXd q;
};

GqAccumulator accumulate_gq(const ArrayConfig& cfg, const ElementPattern& w,
                            const std::vector<double>& d0, const QuadratureSpec& quad) {
  quad.validate();
  const auto n = static_cast<Eigen::Index>(d0.size());
  if (d0.empty() || d0.size() != cfg.a.size() || d0.size() != cfg.beta.size())
    throw validation_error("build_G/build_q: d0 length must match array config");
  if (!(cfg.wavelength > 0.0)) throw validation_error("build_G/build_q: wavelength must be positive");
  if (!(d0[0] > 0.0)) throw validation_error("build_G/build_q: d0 must be positive");
  for (std::size_t i = 1; i < d0.size(); ++i)
    if (!(d0[i] > d0[i - 1])) throw validation_error("build_G/build_q: d0 must be strictly increasing");

  const double k = 2.0 * M_PI / cfg.wavelength;
  const int nt = quad.n_theta;
  const int np = quad.n_phi;
  const double ht = M_PI / nt;
  const double hp = 2.0 * M_PI / np;

  std::vector<GqAccumulator> rows(static_cast<std::size_t>(nt) + 1);
  parallel_for(static_cast<std::size_t>(nt) + 1, [&](std::size_t i) {
    Eigen::MatrixXd Gr = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd qr = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd z(n);
    const double theta = static_cast<double>(i) * ht;
    const double st = std::sin(theta);
    for (int j = 0; j < np; ++j) {
      const double phi = -M_PI + j * hp;
      const double u = st * std::cos(phi);
      const double we = w(SphDirection{theta, phi});
      double f0 = 0.0;
      for (Eigen::Index m = 0; m < n; ++m) {
        const double arg = k * d0[static_cast<std::size_t>(m)] * u + cfg.beta[static_cast<std::size_t>(m)];
        z[m] = cfg.a[static_cast<std::size_t>(m)] * k * u * we * std::sin(arg);
        f0 += cfg.a[static_cast<std::size_t>(m)] * std::cos(arg);
      }
      Gr.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0);
      qr += (we * f0) * z;
    }
    const double tw = (i == 0 || i == static_cast<std::size_t>(nt)) ? 0.5 : 1.0;
    rows[i].G = Gr * (st * tw);
    rows[i].q = qr * (st * tw);
  });

  GqAccumulator out;
  out.G = Eigen::MatrixXd::Zero(n, n);
  out.q = Eigen::VectorXd::Zero(n);
  for (const auto& r : rows) {
    out.G += r.G;
    out.q += r.q;
  }
  out.G *= ht * hp;
  out.q *= ht * hp;
  out.G = Eigen::MatrixXd(out.G.selfadjointView<Eigen::Lower>());
  return out;
}

// Constraint rows C e >= b derived from the problem.
void build_constraints(const PerturbationProblem& prob, Eigen::MatrixXd& C, Eigen::VectorXd& b) {
  const Eigen::Index n = prob.d0.size();
  const Eigen::Index chain = n - 1;
  const Eigen::Index rows = chain + (prob.constrain_center_gap ? 1 : 0);
  C = Eigen::MatrixXd::Zero(rows, n);
  b = Eigen::VectorXd::Zero(rows);
  for (Eigen::Index i = 0; i < chain; ++i) {
    C(i, i) = -1.0;
    C(i, i + 1) = 1.0;
    b(i) = prob.d_min - (prob.d0(i + 1) - prob.d0(i));
  }
  if (prob.constrain_center_gap) {
    C(chain, 0) = 2.0;
    b(chain) = prob.d_min - 2.0 * prob.d0(0);
  }
}

struct EqSolve {
  Eigen::VectorXd e;
  Eigen::VectorXd nu;  // multipliers of the active rows
  bool ridged = false;
};

EqSolve solve_equality(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                       const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                       const std::vector<int>& active, double ridge) {
  const Eigen::Index n = H.rows();
  const auto na = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd K(n + na, n + na);
  Eigen::VectorXd rhs(n + na);
  EqSolve out;

  for (int attempt = 0; attempt < 2; ++attempt) {
    K.setZero();
    K.topLeftCorner(n, n) = H;
    if (attempt == 1) {
      K.topLeftCorner(n, n) += ridge * Eigen::MatrixXd::Identity(n, n);
      out.ridged = true;
    }
    for (Eigen::Index i = 0; i < na; ++i) {
      K.block(n + i, 0, 1, n) = C.row(active[static_cast<std::size_t>(i)]);
      K.block(0, n + i, n, 1) = -C.row(active[static_cast<std::size_t>(i)]).transpose();
    }
    rhs.head(n) = g;
    for (Eigen::Index i = 0; i < na; ++i) rhs(n + i) = b(active[static_cast<std::size_t>(i)]);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.isInvertible()) {
      const Eigen::VectorXd sol = lu.solve(rhs);
      out.e = sol.head(n);
      out.nu = sol.tail(na);
      if (out.e.allFinite()) return out;
    }
    if (attempt == 1) throw numeric_error("perturbation solve: singular KKT system");
  }
  return out;  // unreachable
}

}  // namespace

void PerturbationProblem::validate() const {
  const Eigen::Index n = d0.size();
  if (n == 0) throw validation_error("perturbation problem: empty spacing vector");
  if (G.rows() != n || G.cols() != n || q.size() != n)
    throw validation_error("perturbation problem: inconsistent G/q dimensions");
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw validation_error("perturbation problem: G not symmetric");
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (d0(i + 1) - d0(i) < d_min - 1e-12) throw validation_error("infeasible spacing");
  if (constrain_center_gap && 2.0 * d0(0) < d_min - 1e-12)
    throw validation_error("infeasible spacing");
}

Eigen::MatrixXd build_G(const ArrayConfig& cfg, const ElementPattern& w,
                        const std::vector<double>& d0, const QuadratureSpec& quad) {
  return accumulate_gq(cfg, w, d0, quad).G;
}

Eigen::VectorXd build_q(const ArrayConfig& cfg, const ElementPattern& w,
                        const std::vector<double>& d0, const QuadratureSpec& quad) {
  return accumulate_gq(cfg, w, d0, quad).q;
}

PerturbationSolution solve_perturbation(const PerturbationProblem& prob) {
  prob.validate();
  const Eigen::Index n = prob.d0.size();
  Eigen::MatrixXd C;
  Eigen::VectorXd b;
  build_constraints(prob, C, b);
  const auto rows = static_cast<int>(C.rows());

  const Eigen::MatrixXd H = 2.0 * prob.G;
  const Eigen::VectorXd g = 2.0 * prob.q;
  const double ridge = 1e-12 * prob.G.trace() / static_cast<double>(n);

  const double bscale = rows > 0 ? std::max(1.0, b.cwiseAbs().maxCoeff()) : 1.0;
  const double feas_tol = 1e-11 * bscale;

  PerturbationSolution sol;
  std::vector<int> active;
  const int max_passes = std::max(4, 4 * rows);
  EqSolve eq;
  for (int pass = 0; pass < max_passes; ++pass) {
    sol.passes = pass + 1;
    eq = solve_equality(H, g, C, b, active, ridge);
    sol.ridged = sol.ridged || eq.ridged;

    // Most violated inactive row, if any.
    int worst = -1;
    double worst_v = feas_tol;
    if (rows > 0) {
      const Eigen::VectorXd viol = b - C * eq.e;
      for (int i = 0; i < rows; ++i) {
        if (std::find(active.begin(), active.end(), i) != active.end()) continue;
        if (viol(i) > worst_v) {
          worst_v = viol(i);
          worst = i;
        }
      }
    }
    if (worst >= 0) {
      active.push_back(worst);
      std::sort(active.begin(), active.end());
      continue;
    }

    // Feasible: drop the most negative multiplier, or stop.
    int drop = -1;
    double most_neg = -1e-11;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (eq.nu(static_cast<Eigen::Index>(i)) < most_neg) {
        most_neg = eq.nu(static_cast<Eigen::Index>(i));
        drop = static_cast<int>(i);
      }
    }
    if (drop < 0) break;
    active.erase(active.begin() + drop);
  }

  sol.e = eq.e;
  sol.active_rows = active;
  sol.multipliers = Eigen::VectorXd::Zero(rows);
  for (std::size_t i = 0; i < active.size(); ++i)
    sol.multipliers(active[i]) = eq.nu(static_cast<Eigen::Index>(i));

  // KKT residual: stationarity, feasibility, complementarity.
  Eigen::VectorXd stat = H * sol.e - g;
  if (rows > 0) stat -= C.transpose() * sol.multipliers;
  double res = stat.cwiseAbs().maxCoeff();
  if (rows > 0) {
    const Eigen::VectorXd slack = C * sol.e - b;
    res = std::max(res, std::max(0.0, -slack.minCoeff()));
    res = std::max(res, sol.multipliers.cwiseProduct(slack).cwiseAbs().maxCoeff());
    res = std::max(res, std::max(0.0, -sol.multipliers.minCoeff()));
  }
  sol.kkt_residual = res;
  return sol;
}

std::vector<double> initial_spacing(std::size_t half_count, double wavelength, double d_min) {
  const double gap = std::max(0.5 * wavelength, d_min);
  std::vector<double> d(half_count);
  for (std::size_t i = 0; i < half_count; ++i) d[i] = (static_cast<double>(i) + 0.5) * gap;
  return d;
}

SpacingResult optimize_spacing(const ArrayConfig& cfg, const ElementPattern& w,
                               const std::vector<double>& d_init, double d_min,
                               const OptimizerSettings& settings, const QuadratureSpec& quad) {
  ArrayConfig work = cfg;
  work.d = d_init;
  work.validate();
  const double cap = settings.cap_for(cfg.wavelength);

  auto objective = [&](const std::vector<double>& d) {
    ArrayConfig c = work;
    c.d = d;
    return radiated_power_integral(c, w, quad);
  };
  auto peak_directivity = [&](const std::vector<double>& d, const geom::SphDirection& pk) {
    ArrayConfig c = work;
    c.d = d;
    return directivity(c, w, pk, quad);
  };
  auto peak_of = [&](const std::vector<double>& d) {
    ArrayConfig c = work;
    c.d = d;
    return find_peak_direction(c, w);
  };

  SpacingResult result;
  std::vector<double> d = d_init;
  double J = objective(d);
  geom::SphDirection peak = peak_of(d);
  result.trace.push_back({0, J, peak_directivity(d, peak), 0.0, 0});

  for (int iter = 1; iter <= settings.max_outer_iters; ++iter) {
    result.iterations = iter;
    PerturbationProblem prob;
    prob.d0 = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    const auto gq = accumulate_gq(work, w, d, quad);
    prob.G = gq.G;
    prob.q = gq.q;
    prob.d_min = d_min;
    const PerturbationSolution sol = solve_perturbation(prob);

    Eigen::VectorXd e = sol.e.cwiseMax(-cap).cwiseMin(cap);

    // Backtrack on the true quadrature objective. Scaled steps stay feasible
    // because e = 0 satisfies every constraint of a feasible iterate.
    double s = 1.0;
    std::vector<double> d_next(d.size());
    double J_next = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      for (std::size_t i = 0; i < d.size(); ++i) d_next[i] = d[i] + s * e(static_cast<Eigen::Index>(i));
      J_next = objective(d_next);
      if (J_next <= J) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    const double step_max = accepted ? s * e.cwiseAbs().maxCoeff() : 0.0;
    if (!accepted || step_max == 0.0) {
      result.converged = true;
      break;
    }

    d = d_next;
    const double drop = (J - J_next) / std::max(J, 1e-300);
    J = J_next;
    if (settings.refresh_peak) peak = peak_of(d);
    result.trace.push_back({iter, J, peak_directivity(d, peak), step_max,
                            static_cast<int>(sol.active_rows.size())});
    if (drop < settings.rel_tol) {
      result.converged = true;
      break;
    }
  }

  result.d_star = d;
  result.peak = peak_of(d);
  result.peak_directivity = peak_directivity(d, result.peak);
  return result;
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::string out = "iter,objective_integral,directivity,max_perturbation,active_constraints\n";
  for (const auto& r : trace) {
    out += csv::field(r.iter) + ',' + csv::field(r.objective_integral) + ',' +
           csv::field(r.directivity) + ',' + csv::field(r.max_perturbation) + ',' +
           csv::field(r.active_constraints) + '\n';
  }
  return out;
}

}  // namespace dronearray::spacing
