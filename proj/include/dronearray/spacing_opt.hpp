#ifndef DRONEARRAY_SPACING_OPT_HPP
#define DRONEARRAY_SPACING_OPT_HPP

#include <Eigen/Dense>
#include <vector>

#include "dronearray/pattern.hpp"

namespace dronearray::spacing {

using pattern::ArrayConfig;
using pattern::ElementPattern;
using pattern::QuadratureSpec;

// Quadratic subproblem in the perturbation vector e:
//   minimize e^T G e - 2 e^T q
//   s.t.     e_{n+1} - e_n >= D_min + d0_n - d0_{n+1}        (ordering chain)
//            2 e_1 >= D_min - 2 d0_1   (optional center pair, see below)
// The chain keeps same-side neighbors D_min apart. The center row keeps the
// innermost element and its mirror apart; the mirror sits at -d_1, so their
// separation is 2 d_1. It is on by default and can be disabled to study the
// chain-only subproblem.
struct PerturbationProblem {
  Eigen::VectorXd d0;
  Eigen::MatrixXd G;
  Eigen::VectorXd q;
  double d_min = 0.0;
  bool constrain_center_gap = true;

  void validate() const;  // G symmetric within 1e-10, consistent sizes, feasible d0
};

struct OptimizerSettings {
  double perturbation_cap = -1.0;  // meters; < 0 means 0.05 * wavelength
  double rel_tol = 1e-6;
  int max_outer_iters = 50;
  bool refresh_peak = true;  // re-run peak search between outer iterations

  double cap_for(double wavelength) const {
    return perturbation_cap < 0.0 ? 0.05 * wavelength : perturbation_cap;
  }
};

struct PerturbationSolution {
  Eigen::VectorXd e;
  Eigen::VectorXd multipliers;    // one per constraint row, 0 when inactive
  std::vector<int> active_rows;
  double kkt_residual = 0.0;
  bool ridged = false;            // reduced system was ridge-regularized
  int passes = 0;
};

struct IterationRecord {
  int iter = 0;
  double objective_integral = 0.0;   // I_int(F^2 w^2) after the update
  double directivity = 0.0;          // at the (refreshed) peak
  double max_perturbation = 0.0;     // max |accepted step component|
  int active_constraints = 0;
};

struct SpacingResult {
  std::vector<double> d_star;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iterations = 0;
  geom::SphDirection peak;      // peak direction of the final spacing
  double peak_directivity = 0.0;
};

// Entries g_{m,n} = I_int(z_m z_n) with
//   z_n = a_n k sin(theta)cos(phi) w(theta,phi) sin(k d0_n sin(theta)cos(phi) + beta_n),
// accumulated on the same grid as radiated_power_integral. Symmetric and
// positive semi-definite by construction (Gram matrix of the z_n).
Eigen::MatrixXd build_G(const ArrayConfig& cfg, const ElementPattern& w,
                        const std::vector<double>& d0, const QuadratureSpec& quad);

// q_n = I_int(z_n w F0) with F0 = sum_n a_n cos(k d0_n sin(theta)cos(phi) + beta_n).
// With this choice e^T G e - 2 e^T q + I_int(F0^2 w^2) reproduces a quarter
// of the linearized radiated power exactly for any element pattern.
Eigen::VectorXd build_q(const ArrayConfig& cfg, const ElementPattern& w,
                        const std::vector<double>& d0, const QuadratureSpec& quad);

// Active-set KKT solve: start unconstrained, add the most-violated row,
// re-solve the equality-constrained system, drop rows with negative
// multipliers; capped at 4x the row count. A numerically singular reduced
// system is ridge-regularized (1e-12 trace(G)/N) and flagged.
PerturbationSolution solve_perturbation(const PerturbationProblem& prob);

// Outer loop: build G and q at the current spacing, solve, clamp the step to
// the perturbation cap, backtrack until the radiated-power integral does not
// increase, repeat until the relative decrease falls below rel_tol.
SpacingResult optimize_spacing(const ArrayConfig& cfg, const ElementPattern& w,
                               const std::vector<double>& d_init, double d_min,
                               const OptimizerSettings& settings, const QuadratureSpec& quad);

// Uniform start d_n = (n - 1/2) * max(wavelength/2, d_min).
std::vector<double> initial_spacing(std::size_t half_count, double wavelength, double d_min);

std::string trace_csv(const std::vector<IterationRecord>& trace);

}  // namespace dronearray::spacing

#endif
