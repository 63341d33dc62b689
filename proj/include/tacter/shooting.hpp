#pragma once

// Shooting method for the two-point boundary value problem: iterate on the
// unknown base strains until the termination conditions at l1 and the free-tip
// conditions at l2 are met.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tacter/common.hpp"
#include "tacter/coupled.hpp"

namespace tacter {

struct ShootingOptions {
  double tolerance = 1e-9;       // on the residual 2-norm (N / N*mm mixed)
  int max_iterations = 100;
  int max_backtracks = 8;
  double fd_step = 1e-7;         // finite-difference Jacobian step scale
};

struct ShootingResult {
  ShootingUnknowns unknowns;
  double residual_norm = 0.0;
  int iterations = 0;
  BackboneSolution backbone;
  bool converged = false;
  double jacobian_condition = 0.0;
  std::string message;
};

namespace detail {

inline int unknown_count(const ModelConfig& cfg) { return cfg.outer_present ? 8 : 6; }

inline Eigen::VectorXd pack_unknowns(const ShootingUnknowns& u, int n) {
  Eigen::VectorXd x(n);
  x.segment<3>(0) = u.u1_0;
  x.segment<3>(3) = u.v1_0;
  if (n == 8) {
    x(6) = u.u_d3_2_0;
    x(7) = u.beta_0;
  }
  return x;
}

inline ShootingUnknowns unpack_unknowns(const Eigen::VectorXd& x) {
  ShootingUnknowns u;
  u.u1_0 = x.segment<3>(0);
  u.v1_0 = x.segment<3>(3);
  if (x.size() == 8) {
    u.u_d3_2_0 = x(6);
    u.beta_0 = x(7);
  }
  return u;
}

}  // namespace detail

// Stacked violation of the boundary conditions: 3 force + 3 moment components
// at the inner tip, plus (with the outer tube present) the d3 force and d3
// moment jump conditions at the outer termination.
inline Eigen::VectorXd shooting_residual(const BackboneSolution& sol, const ModelConfig& cfg) {
  Eigen::VectorXd r(detail::unknown_count(cfg));
  r.segment<3>(0) = sol.n2_tip - sol.F2_tip;
  r.segment<3>(3) = sol.m2_tip - sol.M2_tip;
  if (cfg.outer_present) {
    r(6) = (sol.n1_l1 - sol.F1_tip).z();
    r(7) = (sol.m1_l1 - sol.M1_tip).z();
  }
  return r;
}

inline Eigen::VectorXd residual(const ShootingUnknowns& unknowns, const ModelConfig& cfg) {
  return shooting_residual(integrate_backbone(cfg, unknowns), cfg);
}

namespace detail {

// Damped Newton iteration with a forward-difference Jacobian. A failed or
// non-finite trial integration counts as a rejected line-search step.
inline ShootingResult newton_solve(const ModelConfig& cfg, const ShootingUnknowns& initial_guess,
                                   const ShootingOptions& opt) {
  const int n = detail::unknown_count(cfg);
  Eigen::VectorXd x = detail::pack_unknowns(initial_guess, n);

  ShootingResult out;
  auto eval = [&](const Eigen::VectorXd& xc, BackboneSolution& bb) {
    bb = integrate_backbone(cfg, detail::unpack_unknowns(xc));
    return shooting_residual(bb, cfg);
  };

  BackboneSolution backbone;
  Eigen::VectorXd r;
  try {
    r = eval(x, backbone);
  } catch (const Error& e) {
    out.message = std::string("initial integration failed: ") + e.what();
    return out;
  }
  double rnorm = r.norm();

  int iter = 0;
  double fd_scale = opt.fd_step;
  for (; iter < opt.max_iterations && rnorm >= opt.tolerance; ++iter) {
    // Forward-difference Jacobian.
    Eigen::MatrixXd J(n, n);
    bool jac_ok = true;
    for (int j = 0; j < n && jac_ok; ++j) {
      // Very stiff sections amplify a strain perturbation enormously; if the
      // probe integration blows up, shrink the step and retry.
      double hj = fd_scale * std::max(1.0, std::abs(x(j)));
      bool col_ok = false;
      for (int attempt = 0; attempt < 6 && !col_ok; ++attempt, hj /= 16.0) {
        Eigen::VectorXd xp = x;
        xp(j) += hj;
        try {
          BackboneSolution tmp;
          J.col(j) = (eval(xp, tmp) - r) / hj;
          col_ok = true;
        } catch (const Error&) {
        }
      }
      jac_ok = col_ok;
    }
    if (!jac_ok) {
      out.message = "Jacobian evaluation failed";
      break;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    {
      const auto diag = lu.matrixLU().diagonal();
      const double mx = diag.cwiseAbs().maxCoeff();
      const double mn = diag.cwiseAbs().minCoeff();
      out.jacobian_condition = (mn > 0.0) ? mx / mn : std::numeric_limits<double>::infinity();
      if (!(mn > 0.0) || !std::isfinite(mx)) {
        out.message = "singular shooting Jacobian";
        break;
      }
    }
    const Eigen::VectorXd step = lu.solve(-r);
    if (!step.allFinite()) {
      out.message = "non-finite Newton step";
      break;
    }

    // Backtracking line search on the residual norm; beta(0) must stay > 0.
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt, alpha *= 0.5) {
      const Eigen::VectorXd xt = x + alpha * step;
      if (n == 8 && !(xt(7) > 0.0)) continue;
      try {
        BackboneSolution bt_backbone;
        const Eigen::VectorXd rt = eval(xt, bt_backbone);
        const double rtnorm = rt.norm();
        if (rtnorm < rnorm || rtnorm < opt.tolerance) {
          x = xt;
          r = rt;
          rnorm = rtnorm;
          backbone = std::move(bt_backbone);
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // trial integration blew up; shrink the step
      }
    }
    if (!accepted) {
      // A stall can stem from forward-difference bias when the residual is
      // strongly curved at the probe scale; retry with a finer step first.
      if (fd_scale > 1e-13) {
        fd_scale *= 1e-2;
        continue;
      }
      out.message = "line search stalled (residual norm " + std::to_string(rnorm) + ")";
      ++iter;
      break;
    }
  }

  out.unknowns = detail::unpack_unknowns(x);
  out.residual_norm = rnorm;
  out.iterations = iter;
  out.backbone = std::move(backbone);
  out.converged = rnorm < opt.tolerance;
  if (!out.converged && out.message.empty())
    out.message = "iteration cap reached (residual norm " + std::to_string(rnorm) + ")";
  return out;
}

// A snapshot of the tendon tensions of a configuration, used as the start
// point of a load-continuation path.
struct LoadPoint {
  std::vector<double> outer, inner;

  static LoadPoint zeros(const ModelConfig& cfg) {
    LoadPoint lp;
    lp.outer.assign(cfg.outer_routes.size(), 0.0);
    lp.inner.assign(cfg.inner_routes.size(), 0.0);
    return lp;
  }
  static LoadPoint of(const ModelConfig& cfg) {
    LoadPoint lp;
    for (const TendonRoute& r : cfg.outer_routes) lp.outer.push_back(r.tension);
    for (const TendonRoute& r : cfg.inner_routes) lp.inner.push_back(r.tension);
    return lp;
  }
  bool matches(const ModelConfig& cfg) const {
    return outer.size() == cfg.outer_routes.size() && inner.size() == cfg.inner_routes.size();
  }
};

inline ModelConfig blend_loads(const ModelConfig& target, const LoadPoint& from, double t) {
  ModelConfig blended = target;
  for (std::size_t i = 0; i < blended.outer_routes.size(); ++i)
    blended.outer_routes[i].tension =
        (1.0 - t) * from.outer[i] + t * target.outer_routes[i].tension;
  for (std::size_t i = 0; i < blended.inner_routes.size(); ++i)
    blended.inner_routes[i].tension =
        (1.0 - t) * from.inner[i] + t * target.inner_routes[i].tension;
  return blended;
}

// Adaptive load-continuation homotopy between a known-converged load point and
// the target loads: the factor step halves on a failed stage and doubles on a
// converged one, warm-starting each stage from the previous converged state.
inline ShootingResult homotopy_solve(const ModelConfig& cfg, const LoadPoint& from,
                                     const ShootingUnknowns& from_guess,
                                     const ShootingOptions& opt, int prior_iterations) {
  int total_iterations = prior_iterations;
  double reached = 0.0, step = 0.5;
  ShootingUnknowns guess = from_guess;
  constexpr double kMinStep = 1.0 / 1024.0;
  // Secant predictor state: the two most recent converged (factor, unknowns)
  // pairs, used to extrapolate the next stage's initial guess.
  const int n = unknown_count(cfg);
  Eigen::VectorXd x_prev = pack_unknowns(from_guess, n);
  double t_prev = 0.0;
  bool have_two = false;
  Eigen::VectorXd x_prev2 = x_prev;
  double t_prev2 = 0.0;
  ShootingResult last;
  last.message = "no continuation stage attempted";
  while (reached < 1.0 && step >= kMinStep) {
    const double target = std::min(1.0, reached + step);
    ShootingUnknowns stage_guess = guess;
    if (have_two && t_prev > t_prev2) {
      Eigen::VectorXd xp =
          x_prev + (x_prev - x_prev2) * ((target - t_prev) / (t_prev - t_prev2));
      if (n == 8 && !(xp(7) > 0.0)) xp(7) = x_prev(7);
      stage_guess = unpack_unknowns(xp);
    }
    ShootingResult stage = newton_solve(blend_loads(cfg, from, target), stage_guess, opt);
    total_iterations += stage.iterations;
    if (stage.converged) {
      reached = target;
      guess = stage.unknowns;
      x_prev2 = x_prev;
      t_prev2 = t_prev;
      x_prev = pack_unknowns(guess, n);
      t_prev = target;
      have_two = true;
      step = std::min(step * 2.0, 1.0);
      if (reached >= 1.0) {
        stage.iterations = total_iterations;
        return stage;
      }
    } else {
      last = std::move(stage);
      step *= 0.5;
    }
  }
  last.iterations = total_iterations;
  last.converged = false;
  last.message += "; load continuation stalled at factor " + std::to_string(reached);
  return last;
}

}  // namespace detail

// Shooting solve with an automatic load-continuation fallback: if Newton from
// the supplied guess stalls (the residual is strongly nonlinear in the base
// curvature when large tensions are applied at once), the tendon loads are
// ramped from zero with an adaptive homotopy, warm-starting each stage.
inline ShootingResult solve(const ModelConfig& cfg,
                            const ShootingUnknowns& initial_guess = ShootingUnknowns::trivial(),
                            const ShootingOptions& opt = {}) {
  ShootingResult direct = detail::newton_solve(cfg, initial_guess, opt);
  if (direct.converged) return direct;
  return detail::homotopy_solve(cfg, detail::LoadPoint::zeros(cfg), ShootingUnknowns::trivial(),
                                opt, direct.iterations);
}

// Sequential continuation: each solve is warm-started from the previous
// converged unknowns, and if direct Newton fails the loads are ramped from the
// previous converged load point (a short homotopy) rather than from zero.
// Per-item failures are recorded and the sweep continues.
inline std::vector<ShootingResult> sweep(const std::vector<ModelConfig>& configs,
                                         const ShootingOptions& opt = {}) {
  std::vector<ShootingResult> results;
  results.reserve(configs.size());
  ShootingUnknowns guess = ShootingUnknowns::trivial();
  detail::LoadPoint prev_loads;
  bool have_prev = false;
  for (const ModelConfig& cfg : configs) {
    ShootingResult res;
    if (have_prev && prev_loads.matches(cfg)) {
      res = detail::newton_solve(cfg, guess, opt);
      if (!res.converged)
        res = detail::homotopy_solve(cfg, prev_loads, guess, opt, res.iterations);
      if (!res.converged) res = solve(cfg, guess, opt);
    } else {
      res = solve(cfg, guess, opt);
    }
    if (res.converged) {
      guess = res.unknowns;
      prev_loads = detail::LoadPoint::of(cfg);
      have_prev = true;
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace tacter
