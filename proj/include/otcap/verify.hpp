#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "otcap/channel.hpp"
#include "otcap/coupling.hpp"
#include "otcap/errors.hpp"
#include "otcap/prob.hpp"
#include "otcap/tension.hpp"

namespace otcap {

// Ideal 1-out-of-2 m-bit string transfer correlation:
// U = (S0,S1) uniform over 4^m, V = (K,S_K) with K a fair bit independent of
// the strings. Satisfies H(U) = 2m, H(V|U) = 1, I(U;V) = m.
struct OTCorrelation {
  int m = 0;
  JointDist joint;  // |U| = 4^m rows, |V| = 2^(m+1) columns, v = k*2^m + s
};

inline OTCorrelation ot_correlation(int m) {
  if (m < 1 || m > 3) throw validation_error("ot_correlation: m must be in [1,3]");
  std::size_t strings = 1ull << m;  // 2^m
  std::size_t nu = strings * strings;
  std::size_t nv = 2 * strings;
  std::vector<double> cells(nu * nv, 0.0);
  double mass = 1.0 / (static_cast<double>(nu) * 2.0);
  for (std::size_t s0 = 0; s0 < strings; ++s0)
    for (std::size_t s1 = 0; s1 < strings; ++s1) {
      std::size_t u = s0 * strings + s1;
      cells[u * nv + (0 * strings + s0)] += mass;  // k = 0 -> Bob sees s0
      cells[u * nv + (1 * strings + s1)] += mass;  // k = 1 -> Bob sees s1
    }
  return {m, JointDist(nu, nv, std::move(cells))};
}

// I(U;V|Q) + I(U;Q|V) - m for a coupling on U = (S0,S1); always >= 0.
inline double ot_alpha_residual(const OTCorrelation& ot, const Coupling& c) {
  JointDist3 t = extend_with_coupling(ot.joint, c);
  return conditional_mutual_information(t, Cmi::uv_given_q) +
         conditional_mutual_information(t, Cmi::uq_given_v) - static_cast<double>(ot.m);
}

// 2 H(V|Q) - H(U|Q) - 2 for the same construction; always >= 0.
inline double ot_entropy_residual(const OTCorrelation& ot, const Coupling& c) {
  JointDist3 t = extend_with_coupling(ot.joint, c);
  auto e = detail::triple_entropies(t);
  double h_v_given_q = e.h_vq - e.h_q;
  double h_u_given_q = e.h_uq - e.h_q;
  return 2.0 * h_v_given_q - h_u_given_q - 2.0;
}

// ---------------------------------------------------------------------------
// Exhaustive lattice minimum of the alpha objective; test oracle.

inline double lattice_point_count(std::size_t rows, std::size_t qcard, int resolution) {
  // compositions of `resolution` into qcard parts, independently per row
  double per_row = 1.0;
  for (std::size_t k = 1; k < qcard; ++k)
    per_row *= static_cast<double>(resolution + k) / static_cast<double>(k);
  return std::pow(per_row, static_cast<double>(rows));
}

namespace detail {

// Definitional evaluation of I(U;Q|V) + I(U;V|Q) on p(u,v,q) = p(u,v)c(q|u)
// as a single log-ratio sum. Deliberately separate arithmetic from the
// optimizer's evaluator so the lattice oracle stays an independent check.
struct LatticeOracleWork {
  const JointDist* j;
  std::size_t nu, nv, nq;
  std::vector<double> pv;
  mutable std::vector<double> pvq, puq, pq;

  LatticeOracleWork(const JointDist& joint, std::size_t qcard)
      : j(&joint), nu(joint.nu), nv(joint.nv), nq(qcard),
        pv(joint.col_marginal().probs), pvq(joint.nv * qcard), puq(joint.nu * qcard),
        pq(qcard) {}

  double operator()(const std::vector<double>& c) const {
    std::fill(pvq.begin(), pvq.end(), 0.0);
    std::fill(puq.begin(), puq.end(), 0.0);
    std::fill(pq.begin(), pq.end(), 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t q = 0; q < nq; ++q) {
        double cuq = c[u * nq + q];
        if (cuq == 0.0) continue;
        for (std::size_t v = 0; v < nv; ++v) {
          double t = j->at(u, v) * cuq;
          pvq[v * nq + q] += t;
          puq[u * nq + q] += t;
          pq[q] += t;
        }
      }
    double total = 0.0;
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v) {
        double puv = j->at(u, v);
        if (puv <= 0.0) continue;
        for (std::size_t q = 0; q < nq; ++q) {
          double t = puv * c[u * nq + q];
          if (t <= 0.0) continue;
          double r1 = t * pv[v] / (puv * pvq[v * nq + q]);         // I(U;Q|V) term
          double r2 = t * pq[q] / (puq[u * nq + q] * pvq[v * nq + q]);  // I(U;V|Q) term
          total += t * (std::log2(r1) + std::log2(r2));
        }
      }
    return total;
  }
};

}  // namespace detail

inline double brute_force_alpha(const JointDist& j, std::size_t qcard, int resolution) {
  if (qcard < 1 || resolution < 1)
    throw validation_error("brute_force_alpha: qcard and resolution must be >= 1");
  if (lattice_point_count(j.nu, qcard, resolution) > 5e7)
    throw validation_error("brute_force_alpha: lattice too large");

  // lattice rows = compositions of `resolution` into qcard nonnegative parts
  std::vector<std::vector<double>> row_choices;
  {
    std::vector<int> counts(qcard, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int remaining) {
      if (i + 1 == qcard) {
        counts[i] = remaining;
        std::vector<double> row(qcard);
        for (std::size_t k = 0; k < qcard; ++k)
          row[k] = static_cast<double>(counts[k]) / static_cast<double>(resolution);
        row_choices.push_back(std::move(row));
        return;
      }
      for (int c = 0; c <= remaining; ++c) {
        counts[i] = c;
        rec(i + 1, remaining - c);
      }
    };
    rec(0, resolution);
  }

  detail::LatticeOracleWork evaluate(j, qcard);
  std::vector<double> c(j.nu * qcard);
  std::vector<std::size_t> pick(j.nu, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t u = 0; u < j.nu; ++u)
      std::copy(row_choices[pick[u]].begin(), row_choices[pick[u]].end(),
                c.begin() + static_cast<long>(u * qcard));
    best = std::min(best, evaluate(c));
    std::size_t u = 0;
    while (u < j.nu && ++pick[u] == row_choices.size()) pick[u++] = 0;
    if (u == j.nu) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Subadditivity construction: U = tilde-U, V = (tilde-V, Y) where X is a
// deterministic function of tilde-U and Y is drawn from the channel at X.

struct SubadditivityCase {
  JointDist base_joint;          // p(tilde-u, tilde-v)
  std::vector<std::size_t> xmap; // tilde-u -> x, total on the tilde-U alphabet
  Channel ch;
};

struct SubadditivityCheck {
  double lhs = 0.0;        // alpha(U;V)
  double rhs_base = 0.0;   // alpha(tilde-U; tilde-V)
  double rhs_channel = 0.0;  // alpha(X;Y)
  bool pass = false;
};

inline JointDist subadditivity_joint(const SubadditivityCase& sc) {
  const JointDist& b = sc.base_joint;
  if (sc.xmap.size() != b.nu)
    throw validation_error("subadditivity_joint: xmap must cover the tilde-U alphabet");
  for (std::size_t x : sc.xmap)
    if (x >= sc.ch.input_card)
      throw validation_error("subadditivity_joint: xmap value outside channel input alphabet");
  std::size_t ny = sc.ch.output_card;
  std::vector<double> cells(b.nu * b.nv * ny, 0.0);
  for (std::size_t u = 0; u < b.nu; ++u)
    for (std::size_t v = 0; v < b.nv; ++v)
      for (std::size_t y = 0; y < ny; ++y)
        cells[u * (b.nv * ny) + (v * ny + y)] = b.at(u, v) * sc.ch.at(sc.xmap[u], y);
  return JointDist(b.nu, b.nv * ny, std::move(cells));
}

inline JointDist channel_joint_of_case(const SubadditivityCase& sc) {
  ProbVector pu = sc.base_joint.row_marginal();
  std::vector<double> px(sc.ch.input_card, 0.0);
  for (std::size_t u = 0; u < pu.size(); ++u) px[sc.xmap[u]] += pu[u];
  return compose_joint(ProbVector(std::move(px)), sc.ch);
}

// Both sides evaluated with the same lattice oracle at the same resolution,
// so neither side carries one-sided optimizer error the other lacks.
inline SubadditivityCheck subadditivity_check(const SubadditivityCase& sc, std::size_t qcard,
                                     const OptimizerOptions& opts, double slack) {
  const JointDist& b = sc.base_joint;
  if (b.nu > 3 || b.nv > 3 || sc.ch.input_card > 3 || sc.ch.output_card > 3)
    throw validation_error("subadditivity_check: alphabets larger than 3 are not supported");
  int res = opts.grid_resolution;
  SubadditivityCheck out;
  out.lhs = brute_force_alpha(subadditivity_joint(sc), qcard, res);
  out.rhs_base = brute_force_alpha(b, qcard, res);
  out.rhs_channel = brute_force_alpha(channel_joint_of_case(sc), qcard, res);
  out.pass = out.lhs <= out.rhs_base + out.rhs_channel + slack;
  return out;
}

// ---------------------------------------------------------------------------
// Randomized suites with plain-text reports.

struct SuiteReport {
  std::string name;
  long trials = 0;
  double worst_residual = 0.0;  // minimum margin seen; negative means violation
  bool pass = false;
  std::string failure;          // reproduction hint for the first failure
  std::vector<double> residuals;
};

inline std::string format_suite_report(const SuiteReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s trials=%-7ld worst_residual=%+.3e  %s", r.name.c_str(),
                r.trials, r.worst_residual, r.pass ? "PASS" : "FAIL");
  std::string line(buf);
  if (!r.pass && !r.failure.empty()) line += "  [" + r.failure + "]";
  return line;
}

// Residuals of both inequalities over random couplings with mixed qcards.
inline SuiteReport ot_floor_suite(int m, long trials, std::uint64_t seed,
                                bool keep_residuals = false) {
  OTCorrelation ot = ot_correlation(m);
  std::size_t full = ot.joint.nu * ot.joint.nv + 2;
  const std::size_t qcards[] = {full, 1, 2, 4};
  SuiteReport rep;
  rep.name = "ot_floor(m=" + std::to_string(m) + ")";
  rep.trials = trials;
  rep.pass = true;
  rep.worst_residual = std::numeric_limits<double>::infinity();
  for (long i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::size_t qcard = qcards[static_cast<std::size_t>(i) % 4];
    Coupling c = random_coupling(rng, ot.joint.nu, qcard);
    double r1 = ot_alpha_residual(ot, c);
    double r2 = ot_entropy_residual(ot, c);
    double worst = std::min(r1, r2);
    if (keep_residuals) rep.residuals.push_back(worst);
    if (worst < rep.worst_residual) rep.worst_residual = worst;
    if (worst < -1e-9 && rep.pass) {
      rep.pass = false;
      rep.failure = "seed=" + std::to_string(seed) + " trial=" + std::to_string(i);
    }
  }
  return rep;
}

inline SubadditivityCase random_binary_case(Rng& rng) {
  std::vector<double> cells = dirichlet_row(rng, 4);
  JointDist base(2, 2, std::move(cells));
  std::vector<std::size_t> xmap = {rng.next_u64() & 1, rng.next_u64() & 1};
  Channel ch(2, 2, [&] {
    auto r0 = dirichlet_row(rng, 2);
    auto r1 = dirichlet_row(rng, 2);
    return std::vector<double>{r0[0], r0[1], r1[0], r1[1]};
  }());
  return {std::move(base), std::move(xmap), std::move(ch)};
}

inline SuiteReport subadditivity_suite(long cases, std::uint64_t seed, int resolution, double slack,
                                bool keep_residuals = false) {
  SuiteReport rep;
  rep.name = "subadditivity(binary)";
  rep.trials = cases;
  rep.pass = true;
  rep.worst_residual = std::numeric_limits<double>::infinity();
  OptimizerOptions opts;
  opts.grid_resolution = resolution;
  for (long i = 0; i < cases; ++i) {
    Rng rng(derive_seed(seed ^ 0xa5a5a5a5ULL, static_cast<std::uint64_t>(i)));
    SubadditivityCase sc = random_binary_case(rng);
    SubadditivityCheck chk = subadditivity_check(sc, 2, opts, slack);
    double margin = chk.rhs_base + chk.rhs_channel + slack - chk.lhs;
    if (keep_residuals) rep.residuals.push_back(margin);
    if (margin < rep.worst_residual) rep.worst_residual = margin;
    if (!chk.pass && rep.pass) {
      rep.pass = false;
      rep.failure = "seed=" + std::to_string(seed) + " case=" + std::to_string(i);
    }
  }
  return rep;
}

// alpha of the ideal transfer correlation equals m; checked from both sides.
inline SuiteReport ot_alpha_value_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.name = "alpha(ot_correlation(1))";
  rep.trials = 1;
  OTCorrelation ot = ot_correlation(1);
  OptimizerOptions opts;
  opts.seed = seed;
  AlphaResult a = alpha_joint(ot.joint, opts);
  rep.worst_residual = a.value - 1.0;
  rep.pass = a.value >= 1.0 - 1e-6 && a.value <= 1.0 + 1e-9;
  if (!rep.pass) rep.failure = "value=" + std::to_string(a.value);
  return rep;
}

// The eps-relaxed values on an ascending grid are
// recorded and checked for monotone non-increase only; continuity at 0 is
// analytic and not asserted.
inline SuiteReport alpha_epsilon_observation(std::uint64_t seed) {
  SuiteReport rep;
  rep.name = "alpha_eps monotonicity";
  OTCorrelation ot = ot_correlation(1);
  OptimizerOptions opts;
  opts.seed = seed;
  opts.restarts = 8;
  std::vector<double> grid = {0.0, 1e-4, 1e-3, 1e-2};
  auto values = alpha_epsilon_curve(ot.joint, grid, alpha_max_qcard(ot.joint), opts);
  rep.trials = static_cast<long>(values.size());
  rep.pass = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    double drop = values[i - 1] - values[i];  // must be >= 0
    if (drop < rep.worst_residual) rep.worst_residual = drop;
    if (values[i] > values[i - 1] + 1e-12) {
      rep.pass = false;
      rep.failure = "eps index " + std::to_string(i);
    }
  }
  return rep;
}

}  // namespace otcap
