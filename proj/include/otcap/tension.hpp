#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "otcap/channel.hpp"
#include "otcap/coupling.hpp"
#include "otcap/errors.hpp"
#include "otcap/parallel.hpp"
#include "otcap/prob.hpp"
#include "otcap/rng.hpp"

namespace otcap {

struct OptimizerOptions {
  int restarts = 32;
  double tol = 1e-9;
  int max_iters = 5000;
  std::uint64_t seed = 0;
  int grid_resolution = 64;
};

inline void check_options(const OptimizerOptions& o) {
  if (o.restarts < 1) throw validation_error("OptimizerOptions: restarts must be >= 1");
  if (!(o.tol > 0.0)) throw validation_error("OptimizerOptions: tol must be > 0");
  if (o.max_iters < 1) throw validation_error("OptimizerOptions: max_iters must be >= 1");
  if (o.grid_resolution < 2) throw validation_error("OptimizerOptions: grid_resolution must be >= 2");
}

// Auxiliary alphabets never need to exceed |U||V| + 2.
inline std::size_t alpha_max_qcard(const JointDist& j) { return j.nu * j.nv + 2; }

struct AlphaResult {
  double value = 0.0;
  Coupling coupling;
  long iterations = 0;
  bool converged = true;
};

// I(X;Q|Y) + I(X;Y|Q) on p(x,y,q) = p(x) p(q|x) p(y|x).
inline double objective_f(const ProbVector& px, const Channel& ch, const Coupling& c) {
  JointDist3 t = extend_with_coupling(compose_joint(px, ch), c);
  return conditional_mutual_information(t, Cmi::uq_given_v) +
         conditional_mutual_information(t, Cmi::uv_given_q);
}

// Same quantity as H(Q|Y) - H(Q|X) + H(Y|Q) - H(Y|X); valid under Q - X - Y.
inline double objective_f_decomposed(const ProbVector& px, const Channel& ch,
                                     const Coupling& c) {
  JointDist3 t = extend_with_coupling(compose_joint(px, ch), c);
  auto e = detail::triple_entropies(t);
  double h_q_given_y = e.h_vq - e.h_v;
  double h_q_given_x = e.h_uq - e.h_u;
  double h_y_given_q = e.h_vq - e.h_q;
  double h_y_given_x = e.h_uv - e.h_u;
  return h_q_given_y - h_q_given_x + h_y_given_q - h_y_given_x;
}

namespace detail {

inline double log2_floored(double x) { return std::log2(x > 1e-18 ? x : 1e-18); }

// Euclidean projection of one row onto the probability simplex.
inline void project_row_to_simplex(double* row, std::size_t n, std::vector<double>& scratch) {
  scratch.assign(row, row + n);
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    css += scratch[k];
    double t = (css - 1.0) / static_cast<double>(k + 1);
    if (scratch[k] - t > 0.0) theta = t;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    row[i] = std::max(row[i] - theta, 0.0);
    sum += row[i];
  }
  for (std::size_t i = 0; i < n; ++i) row[i] /= sum;
}

struct DescentOutcome {
  std::vector<double> x;
  double value = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Projected-gradient descent over a stack of simplex rows, with step halving.
// Accepts a candidate only if it is feasible and strictly improves, so the
// returned value is always attained by a feasible point.
template <class EvalFn, class GradFn, class FeasFn>
DescentOutcome projected_descent(std::vector<double> x, std::size_t rows, std::size_t cols,
                                 EvalFn&& eval, GradFn&& grad, FeasFn&& feasible,
                                 int max_iters, double tol) {
  DescentOutcome out;
  double f = eval(x);
  std::vector<double> g(x.size()), cand(x.size()), scratch(cols);
  double step = 0.25;
  bool fresh_grad = true;
  long iters = 0;
  while (iters < max_iters) {
    ++iters;
    if (fresh_grad) grad(x, g);
    cand = x;
    for (std::size_t i = 0; i < x.size(); ++i) cand[i] -= step * g[i];
    for (std::size_t r = 0; r < rows; ++r)
      project_row_to_simplex(cand.data() + r * cols, cols, scratch);
    bool ok = feasible(cand);
    double fc = ok ? eval(cand) : std::numeric_limits<double>::infinity();
    if (ok && fc < f) {
      double gain = f - fc;
      x.swap(cand);
      f = fc;
      fresh_grad = true;
      step = std::min(step * 2.0, 4.0);
      if (gain < tol) { out.converged = true; break; }
    } else {
      step *= 0.5;
      fresh_grad = false;
      if (step < 1e-14) { out.converged = true; break; }
    }
  }
  out.x = std::move(x);
  out.value = f;
  out.iterations = iters;
  return out;
}

// Fused evaluation of the two conditional informations for the Markov
// extension p(u,v,q) = p(u,v) c(q|u). Buffers are reused across calls;
// one instance per worker.
struct MarkovAlphaWork {
  const JointDist* j;
  std::size_t nu, nv, nq;
  std::vector<double> pu;
  double h_uv, h_v;
  mutable std::vector<double> pvq, puq, pq;

  MarkovAlphaWork(const JointDist& joint, std::size_t qcard)
      : j(&joint), nu(joint.nu), nv(joint.nv), nq(qcard),
        pu(joint.row_marginal().probs),
        h_uv(joint_entropy(joint)),
        h_v(entropy(joint.col_marginal())),
        pvq(nv * qcard), puq(nu * qcard), pq(qcard) {}

  void marginals(const std::vector<double>& c) const {
    std::fill(pvq.begin(), pvq.end(), 0.0);
    std::fill(pq.begin(), pq.end(), 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t q = 0; q < nq; ++q) {
        double cuq = c[u * nq + q];
        puq[u * nq + q] = pu[u] * cuq;
        pq[q] += pu[u] * cuq;
        if (cuq == 0.0) continue;
        for (std::size_t v = 0; v < nv; ++v) pvq[v * nq + q] += j->at(u, v) * cuq;
      }
  }

  // s2 = I(U;Q|V) = H(V,Q) - H(V) - H(Q|U)
  // s3 = I(U;V|Q) = H(U,Q) + H(V,Q) - H(Q) - H(U,V) - H(Q|U)
  void components(const std::vector<double>& c, double& s2, double& s3) const {
    marginals(c);
    double h_q_given_u = 0.0;
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t q = 0; q < nq; ++q) h_q_given_u += pu[u] * neg_plog2p(c[u * nq + q]);
    double h_vq = entropy_of(pvq), h_uq = entropy_of(puq), h_q = entropy_of(pq);
    s2 = h_vq - h_v - h_q_given_u;
    s3 = h_uq + h_vq - h_q - h_uv - h_q_given_u;
  }

  double alpha_objective(const std::vector<double>& c) const {
    double s2, s3;
    components(c, s2, s3);
    return s2 + s3;
  }

  // d s2 / d c(u,q) = -sum_v p(u,v) log p(v,q) + p(u) log c(u,q)
  // d s3 / d c(u,q) = -p(u) log p(u,q) - sum_v p(u,v) log p(v,q)
  //                   + p(u) log p(q) + p(u) log c(u,q)
  // (per-row additive constants are irrelevant after projection)
  void scalarized_gradient(const std::vector<double>& c, double w2, double w3,
                           std::vector<double>& g) const {
    marginals(c);
    for (std::size_t u = 0; u < nu; ++u) {
      if (pu[u] <= 0.0) {
        for (std::size_t q = 0; q < nq; ++q) g[u * nq + q] = 0.0;
        continue;
      }
      for (std::size_t q = 0; q < nq; ++q) {
        double sv = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
          double puv = j->at(u, v);
          if (puv > 0.0) sv += puv * log2_floored(pvq[v * nq + q]);
        }
        double lc = log2_floored(c[u * nq + q]);
        double g2 = -sv + pu[u] * lc;
        double g3 = -pu[u] * log2_floored(puq[u * nq + q]) - sv +
                    pu[u] * log2_floored(pq[q]) + pu[u] * lc;
        g[u * nq + q] = w2 * g2 + w3 * g3;
      }
    }
  }
};

struct MarkovStart {
  std::vector<double> c;
  bool analytic = false;
  double analytic_value = 0.0;
};

// Start set: constant Q, Q = U when it fits, then Dirichlet rows. The two
// deterministic starts carry their exact objective values, I(U;V) and
// H(U|V), so the best result never exceeds either.
inline std::vector<MarkovStart> markov_starts(const JointDist& j, std::size_t qcard,
                                              const OptimizerOptions& opts) {
  std::vector<MarkovStart> starts;
  starts.push_back({constant_coupling(j.nu, qcard).p, true, mutual_information(j)});
  if (qcard >= j.nu)
    starts.push_back({copy_coupling(j.nu, qcard).p, true, conditional_entropy(j)});
  int randoms = std::max(0, opts.restarts - 2);
  for (int r = 0; r < randoms; ++r) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(r) + 2));
    starts.push_back({random_coupling(rng, j.nu, qcard).p, false, 0.0});
  }
  return starts;
}

}  // namespace detail

// min over Q - U - V of I(U;Q|V) + I(U;V|Q), multistart projected descent.
// The returned value is an upper bound on the true minimum and never exceeds
// min(I(U;V), H(U|V)).
inline AlphaResult alpha_joint(const JointDist& j, std::size_t qcard,
                               const OptimizerOptions& opts) {
  check_options(opts);
  if (qcard < 1) throw validation_error("alpha_joint: qcard must be >= 1");
  if (qcard > alpha_max_qcard(j))
    throw validation_error("alpha_joint: qcard exceeds |U||V|+2");

  if (j.nu == 1 || j.nv == 1)
    return {0.0, constant_coupling(j.nu, qcard), 0, true};
  if (qcard == 1)
    return {mutual_information(j), constant_coupling(j.nu, 1), 0, true};

  auto starts = detail::markov_starts(j, qcard, opts);
  std::vector<detail::DescentOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    detail::MarkovAlphaWork work(j, qcard);
    outcomes[i] = detail::projected_descent(
        starts[i].c, j.nu, qcard,
        [&](const std::vector<double>& c) { return work.alpha_objective(c); },
        [&](const std::vector<double>& c, std::vector<double>& g) {
          work.scalarized_gradient(c, 1.0, 1.0, g);
        },
        [](const std::vector<double>&) { return true; }, opts.max_iters, opts.tol);
  });

  AlphaResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (starts[i].analytic && starts[i].analytic_value < best.value) {
      best.value = starts[i].analytic_value;
      best.coupling = Coupling(j.nu, qcard, starts[i].c);
    }
    if (outcomes[i].value < best.value) {
      best.value = outcomes[i].value;
      best.coupling = Coupling(j.nu, qcard, outcomes[i].x);
    }
    best.iterations += outcomes[i].iterations;
    best.converged = best.converged && outcomes[i].converged;
  }
  return best;
}

inline AlphaResult alpha_joint(const JointDist& j, const OptimizerOptions& opts) {
  return alpha_joint(j, alpha_max_qcard(j), opts);
}

// Channel form: min over Q - X - Y of I(X;Q|Y) + I(X;Y|Q) at fixed p(x).
inline AlphaResult alpha_inner(const ProbVector& px, const Channel& ch, std::size_t qcard,
                               const OptimizerOptions& opts) {
  return alpha_joint(compose_joint(px, ch), qcard, opts);
}

inline AlphaResult alpha_inner(const ProbVector& px, const Channel& ch,
                               const OptimizerOptions& opts) {
  return alpha_inner(px, ch, ch.input_card * ch.output_card + 2, opts);
}

// ---------------------------------------------------------------------------
// eps-relaxed form: Q may depend on both coordinates, subject to I(Q;V|U) <= eps.

namespace detail {

// Work buffers for a general coupling d(q|u,v), rows indexed by u*|V|+v.
struct GeneralAlphaWork {
  const JointDist* j;
  std::size_t nu, nv, nq;
  double h_uv, h_v, h_u;
  mutable std::vector<double> pvq, puq, pq;
  mutable double h_uvq = 0.0;

  GeneralAlphaWork(const JointDist& joint, std::size_t qcard)
      : j(&joint), nu(joint.nu), nv(joint.nv), nq(qcard),
        h_uv(joint_entropy(joint)),
        h_v(entropy(joint.col_marginal())),
        h_u(entropy(joint.row_marginal())),
        pvq(joint.nv * qcard), puq(joint.nu * qcard), pq(qcard) {}

  void marginals(const std::vector<double>& d) const {
    std::fill(pvq.begin(), pvq.end(), 0.0);
    std::fill(puq.begin(), puq.end(), 0.0);
    std::fill(pq.begin(), pq.end(), 0.0);
    h_uvq = 0.0;
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v) {
        double puv = j->at(u, v);
        if (puv <= 0.0) continue;
        for (std::size_t q = 0; q < nq; ++q) {
          double t = puv * d[(u * nv + v) * nq + q];
          h_uvq += neg_plog2p(t);
          pvq[v * nq + q] += t;
          puq[u * nq + q] += t;
          pq[q] += t;
        }
      }
  }

  // objective = H(U,V) + 2H(V,Q) + H(U,Q) - H(V) - H(Q) - 2H(U,V,Q)
  // constraint = I(Q;V|U) = H(U,Q) - H(U) - H(U,V,Q) + H(U,V)
  void eval(const std::vector<double>& d, double& objective, double& constraint) const {
    marginals(d);
    double h_vq = entropy_of(pvq), h_uq = entropy_of(puq), h_q = entropy_of(pq);
    objective = h_uv + 2.0 * h_vq + h_uq - h_v - h_q - 2.0 * h_uvq;
    constraint = h_uq - h_u - h_uvq + h_uv;
  }

  // d obj / d d(u,v,q) = p(u,v) [2 log t - 2 log p(v,q) - log p(u,q) + log p(q)]
  void gradient(const std::vector<double>& d, std::vector<double>& g) const {
    marginals(d);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v) {
        double puv = j->at(u, v);
        for (std::size_t q = 0; q < nq; ++q) {
          std::size_t i = (u * nv + v) * nq + q;
          if (puv <= 0.0) { g[i] = 0.0; continue; }
          double t = puv * d[i];
          g[i] = puv * (2.0 * log2_floored(t) - 2.0 * log2_floored(pvq[v * nq + q]) -
                        log2_floored(puq[u * nq + q]) + log2_floored(pq[q]));
        }
      }
  }
};

// Lifts a Markov coupling p(q|u) to the general row layout p(q|u,v).
inline std::vector<double> lift_markov_coupling(const Coupling& c, std::size_t nv) {
  std::vector<double> d(c.ucard * nv * c.qcard);
  for (std::size_t u = 0; u < c.ucard; ++u)
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t q = 0; q < c.qcard; ++q)
        d[(u * nv + v) * c.qcard + q] = c.at(u, q);
  return d;
}

inline std::vector<double> general_copy_v(std::size_t nu, std::size_t nv, std::size_t qcard) {
  std::vector<double> d(nu * nv * qcard, 0.0);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v) d[(u * nv + v) * qcard + v] = 1.0;
  return d;
}

struct EpsLevelResult {
  double value = 0.0;
  std::vector<std::vector<double>> finals;  // feasible couplings worth reusing
};

inline EpsLevelResult alpha_epsilon_level(const JointDist& j, double eps, std::size_t qcard,
                                          const OptimizerOptions& opts,
                                          const std::vector<std::vector<double>>& pool,
                                          std::uint64_t level_index) {
  GeneralAlphaWork probe(j, qcard);
  const double feas_tol = 1e-12;
  auto is_feasible = [&](const std::vector<double>& d) {
    double obj, con;
    probe.eval(d, obj, con);
    return con <= eps + feas_tol;
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(lift_markov_coupling(constant_coupling(j.nu, qcard), j.nv));
  if (qcard >= j.nu)
    starts.push_back(lift_markov_coupling(copy_coupling(j.nu, qcard), j.nv));
  if (qcard >= j.nv) {
    auto dv = general_copy_v(j.nu, j.nv, qcard);
    if (is_feasible(dv)) starts.push_back(std::move(dv));
  }
  for (const auto& d : pool)
    if (is_feasible(d)) starts.push_back(d);
  int randoms = std::max(0, opts.restarts - 2);
  for (int r = 0; r < randoms; ++r) {
    Rng rng(derive_seed(opts.seed ^ (level_index * 0x51ed2701ULL), static_cast<std::uint64_t>(r)));
    std::vector<double> d;
    d.reserve(j.nu * j.nv * qcard);
    for (std::size_t row = 0; row < j.nu * j.nv; ++row) {
      auto rr = dirichlet_row(rng, qcard);
      d.insert(d.end(), rr.begin(), rr.end());
    }
    if (is_feasible(d)) starts.push_back(std::move(d));  // infeasible draws are discarded
  }

  std::vector<DescentOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    GeneralAlphaWork work(j, qcard);
    double obj, con;
    outcomes[i] = projected_descent(
        starts[i], j.nu * j.nv, qcard,
        [&](const std::vector<double>& d) {
          work.eval(d, obj, con);
          return obj;
        },
        [&](const std::vector<double>& d, std::vector<double>& g) { work.gradient(d, g); },
        [&](const std::vector<double>& d) {
          work.eval(d, obj, con);
          return con <= eps + feas_tol;
        },
        opts.max_iters, opts.tol);
  });

  EpsLevelResult res;
  res.value = std::numeric_limits<double>::infinity();
  for (auto& o : outcomes) {
    if (o.value < res.value) res.value = o.value;
    res.finals.push_back(std::move(o.x));
  }
  return res;
}

}  // namespace detail

// Values for an ascending eps grid, reusing every feasible candidate from the
// smaller-eps levels; the output is therefore non-increasing.
inline std::vector<double> alpha_epsilon_curve(const JointDist& j,
                                               const std::vector<double>& eps_values,
                                               std::size_t qcard,
                                               const OptimizerOptions& opts) {
  check_options(opts);
  if (qcard < 1 || qcard > alpha_max_qcard(j))
    throw validation_error("alpha_epsilon_curve: qcard out of range");
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    if (!(eps_values[i] >= 0.0))
      throw validation_error("alpha_epsilon_curve: eps must be >= 0");
    if (i > 0 && eps_values[i] < eps_values[i - 1])
      throw validation_error("alpha_epsilon_curve: eps grid must be ascending");
  }

  // The Markov optimum is feasible at every eps; it anchors the pool.
  AlphaResult markov = alpha_joint(j, qcard, opts);
  std::vector<std::vector<double>> pool;
  pool.push_back(detail::lift_markov_coupling(markov.coupling, j.nv));

  std::vector<double> values;
  double best_so_far = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    double eps = eps_values[i];
    double v;
    if (eps == 0.0) {
      v = markov.value;
    } else {
      auto level = detail::alpha_epsilon_level(j, eps, qcard, opts, pool, i);
      v = level.value;
      for (auto& d : level.finals) pool.push_back(std::move(d));
    }
    best_so_far = std::min(best_so_far, v);
    values.push_back(best_so_far);
  }
  return values;
}

// min of I(U;Q|V) + I(U;V|Q) over p(q|u,v) with I(Q;V|U) <= eps.
// At eps = 0 this is exactly alpha_joint.
inline double alpha_epsilon(const JointDist& j, double eps, std::size_t qcard,
                            const OptimizerOptions& opts) {
  if (!(eps >= 0.0)) throw validation_error("alpha_epsilon: eps must be >= 0");
  return alpha_epsilon_curve(j, {eps}, qcard, opts).back();
}

// ---------------------------------------------------------------------------
// Frontier of {(I(U;Q|V), I(U;V|Q)) : Q - U - V} via scalarization.

struct SlicePoint {
  double lambda = 0.0;
  double s2 = 0.0;  // I(U;Q|V)
  double s3 = 0.0;  // I(U;V|Q)
};

// Minimizes lambda*s2 + (1-lambda)*s3 on a lambda grid. Every run's final
// coupling joins a shared candidate pool and each lambda reports the pool
// optimum, so the reported points lie on the pool's lower convex hull.
inline std::vector<SlicePoint> tension_slice(const JointDist& j, int num_points,
                                             std::size_t qcard, const OptimizerOptions& opts) {
  check_options(opts);
  if (num_points < 2) throw validation_error("tension_slice: num_points must be >= 2");
  if (qcard < 1 || qcard > alpha_max_qcard(j))
    throw validation_error("tension_slice: qcard out of range");

  std::vector<double> lambdas(static_cast<std::size_t>(num_points));
  for (int i = 0; i < num_points; ++i)
    lambdas[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / static_cast<double>(num_points - 1);

  // candidate pool of exact (s2, s3) pairs, seeded with the two closed forms
  std::vector<std::pair<double, double>> pool;
  pool.emplace_back(0.0, mutual_information(j));                 // constant Q
  if (qcard >= j.nu) pool.emplace_back(conditional_entropy(j), 0.0);  // Q = U

  if (j.nu > 1 && j.nv > 1) {
    std::vector<std::vector<std::pair<double, double>>> per_lambda(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t li) {
      double w2 = lambdas[li], w3 = 1.0 - lambdas[li];
      detail::MarkovAlphaWork work(j, qcard);
      auto starts = detail::markov_starts(
          j, qcard,
          OptimizerOptions{opts.restarts, opts.tol, opts.max_iters,
                           derive_seed(opts.seed, 1000 + li), opts.grid_resolution});
      for (auto& s : starts) {
        auto out = detail::projected_descent(
            s.c, j.nu, qcard,
            [&](const std::vector<double>& c) {
              double s2, s3;
              work.components(c, s2, s3);
              return w2 * s2 + w3 * s3;
            },
            [&](const std::vector<double>& c, std::vector<double>& g) {
              work.scalarized_gradient(c, w2, w3, g);
            },
            [](const std::vector<double>&) { return true; }, opts.max_iters, opts.tol);
        double s2, s3;
        work.components(out.x, s2, s3);
        per_lambda[li].emplace_back(std::max(s2, 0.0), std::max(s3, 0.0));
      }
    });
    for (auto& v : per_lambda)
      for (auto& p : v) pool.push_back(p);
  }

  std::vector<SlicePoint> points;
  points.reserve(lambdas.size());
  for (double lam : lambdas) {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      double val = lam * pool[i].first + (1.0 - lam) * pool[i].second;
      if (val < best_val) { best_val = val; best = i; }
    }
    points.push_back({lam, pool[best].first, pool[best].second});
  }
  std::sort(points.begin(), points.end(),
            [](const SlicePoint& a, const SlicePoint& b) { return a.s2 < b.s2; });
  return points;
}

}  // namespace otcap
