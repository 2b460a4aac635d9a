#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "otcap/channel.hpp"
#include "otcap/parallel.hpp"
#include "otcap/tension.hpp"

namespace otcap {

struct BoundDiagnostics {
  int restarts = 0;
  long iterations = 0;
  bool converged = true;
};

// A bound value in bits per channel use with the achieving input
// distribution and, where one exists, the achieving coupling.
struct BoundResult {
  double value = 0.0;
  ProbVector arg_px;
  std::optional<Coupling> arg_coupling;
  BoundDiagnostics diagnostics;
};

// min(I(X;Y), H(X|Y)) at a fixed input distribution.
inline double ac13_objective(const ProbVector& px, const Channel& ch) {
  JointDist j = compose_joint(px, ch);
  return std::min(mutual_information(j), conditional_entropy(j));
}

namespace detail {

inline ProbVector binary_px(double p1) { return ProbVector({1.0 - p1, p1}); }

// Bound values are nonnegative; anything in (-1e-10, 0) is rounding noise.
inline double snap_nonneg(double v) { return v > -1e-10 && v < 0.0 ? 0.0 : v; }

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Scan1D {
  double best_x = 0.0;
  double best_value = -1.0;
};

// Dense grid on [lo, hi] followed by window-halving rezoom around the best
// point. Robust to kinks (the target may be a min of two smooth curves).
// Ties go to the larger x, i.e. the lexicographically smaller (1-x, x).
template <class Fn>
Scan1D grid_maximize(Fn&& f, double lo, double hi, int grid, int zoom_levels) {
  Scan1D s;
  auto scan = [&](double a, double b, int n) {
    for (int i = 0; i <= n; ++i) {
      double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
      double v = f(x);
      if (v > s.best_value || (v == s.best_value && x > s.best_x)) {
        s.best_value = v;
        s.best_x = x;
      }
    }
  };
  scan(lo, hi, grid);
  double w = (hi - lo) / static_cast<double>(grid);
  for (int level = 0; level < zoom_levels; ++level) {
    scan(std::max(lo, s.best_x - w), std::min(hi, s.best_x + w), 32);
    w /= 16.0;
  }
  return s;
}

// Golden-section maximization for a concave objective on [lo, hi].
template <class Fn>
Scan1D golden_maximize(Fn&& f, double lo, double hi, double bracket_tol) {
  const double inv_phi = 0.6180339887498949;
  Scan1D s;
  auto consider = [&](double x, double v) {
    if (v > s.best_value) { s.best_value = v; s.best_x = x; }
  };
  consider(lo, f(lo));
  consider(hi, f(hi));
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  consider(x1, f1);
  consider(x2, f2);
  while (b - a > bracket_tol) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
      consider(x2, f2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
      consider(x1, f1);
    }
  }
  return s;
}

// All points of the simplex lattice {k/denominator} in lexicographic order.
inline void simplex_lattice(std::size_t dims, int denominator,
                            const std::function<void(const std::vector<double>&)>& visit) {
  std::vector<int> counts(dims, 0);
  std::vector<double> point(dims, 0.0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int remaining) {
    if (i + 1 == dims) {
      counts[i] = remaining;
      for (std::size_t k = 0; k < dims; ++k)
        point[k] = static_cast<double>(counts[k]) / static_cast<double>(denominator);
      visit(point);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[i] = c;
      rec(i + 1, remaining - c);
    }
  };
  rec(0, denominator);
}

// Hill climbing along e_i - e_j moves, which stay on the simplex.
template <class Fn>
void simplex_pattern_search(std::vector<double>& p, double& value, Fn&& f, double h0,
                            double h_min) {
  const std::size_t n = p.size();
  double h = h0;
  while (h > h_min) {
    bool improved = false;
    std::vector<double> best_p = p;
    double best_v = value;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || p[j] < h) continue;
        std::vector<double> cand = p;
        cand[i] += h;
        cand[j] -= h;
        double v = f(cand);
        if (v > best_v) { best_v = v; best_p = cand; improved = true; }
      }
    if (improved) {
      p = best_p;
      value = best_v;
    } else {
      h /= 2.0;
    }
  }
}

}  // namespace detail

// max over p(x) of min(I(X;Y), H(X|Y)). Dense grid plus local refinement on
// every path; the min of two concave curves need not be concave.
inline BoundResult ac13_bound(const Channel& ch, const OptimizerOptions& opts) {
  check_options(opts);
  BoundResult res;
  res.diagnostics.restarts = 0;
  if (ch.input_card == 1) {
    res.value = 0.0;
    res.arg_px = ProbVector({1.0});
    return res;
  }
  if (ch.input_card == 2) {
    int grid = std::max(1024, opts.grid_resolution);
    auto s = detail::grid_maximize(
        [&](double a) { return ac13_objective(detail::binary_px(a), ch); }, 0.0, 1.0, grid, 8);
    res.value = detail::snap_nonneg(s.best_value);
    res.arg_px = detail::binary_px(s.best_x);
    return res;
  }
  std::vector<double> best_p;
  double best_v = -1.0;
  detail::simplex_lattice(ch.input_card, opts.grid_resolution, [&](const std::vector<double>& p) {
    double v = ac13_objective(ProbVector(std::vector<double>(p)), ch);
    if (v > best_v || (v == best_v && detail::lex_less(p, best_p))) {
      best_v = v;
      best_p = p;
    }
  });
  detail::simplex_pattern_search(
      best_p, best_v,
      [&](const std::vector<double>& p) {
        return ac13_objective(ProbVector(std::vector<double>(p)), ch);
      },
      1.0 / static_cast<double>(opts.grid_resolution), 1e-7);
  res.value = detail::snap_nonneg(best_v);
  res.arg_px = ProbVector(std::move(best_p));
  return res;
}

// max over p(x) of the channel alpha functional. Binary inputs use
// golden-section (alpha is concave in p(x)); larger alphabets use a simplex
// lattice plus pattern-search refinement. qcard may be lowered below the
// default |X||Y|+2 for restricted searches.
inline BoundResult new_upper_bound(const Channel& ch, std::size_t qcard,
                                   const OptimizerOptions& opts) {
  check_options(opts);
  BoundResult res;
  res.diagnostics.restarts = opts.restarts;

  long total_iters = 0;
  bool all_converged = true;
  auto alpha_at = [&](const ProbVector& px) {
    AlphaResult a = alpha_inner(px, ch, qcard, opts);
    total_iters += a.iterations;
    all_converged = all_converged && a.converged;
    return a;
  };

  if (ch.input_card == 1) {
    res.value = 0.0;
    res.arg_px = ProbVector({1.0});
    res.arg_coupling = constant_coupling(1, qcard);
    return res;
  }
  if (ch.input_card == 2) {
    auto s = detail::golden_maximize(
        [&](double a) { return alpha_at(detail::binary_px(a)).value; }, 0.0, 1.0, 1e-6);
    res.arg_px = detail::binary_px(s.best_x);
    AlphaResult a = alpha_at(res.arg_px);
    res.value = detail::snap_nonneg(std::min(a.value, s.best_value));
    res.arg_coupling = a.coupling;
    res.diagnostics.iterations = total_iters;
    res.diagnostics.converged = all_converged;
    return res;
  }

  std::vector<double> best_p;
  double best_v = -1.0;
  detail::simplex_lattice(ch.input_card, opts.grid_resolution, [&](const std::vector<double>& p) {
    double v = alpha_at(ProbVector(std::vector<double>(p))).value;
    if (v > best_v || (v == best_v && detail::lex_less(p, best_p))) {
      best_v = v;
      best_p = p;
    }
  });
  detail::simplex_pattern_search(
      best_p, best_v,
      [&](const std::vector<double>& p) {
        return alpha_at(ProbVector(std::vector<double>(p))).value;
      },
      1.0 / static_cast<double>(opts.grid_resolution), 1e-7);
  res.arg_px = ProbVector(std::move(best_p));
  AlphaResult a = alpha_at(res.arg_px);
  res.value = detail::snap_nonneg(std::min(a.value, best_v));
  res.arg_coupling = a.coupling;
  res.diagnostics.iterations = total_iters;
  res.diagnostics.converged = all_converged;
  return res;
}

inline BoundResult new_upper_bound(const Channel& ch, const OptimizerOptions& opts) {
  return new_upper_bound(ch, ch.input_card * ch.output_card + 2, opts);
}

// Z-channel bound over the one-parameter coupling family
// p(q=0|x=0) = a, p(q=0|x=1) = 0 with binary Q. The family contains both
// the constant coupling (a = 0) and the copy coupling (a = 1).
inline BoundResult zchannel_restricted_bound(double t, const OptimizerOptions& opts) {
  check_options(opts);
  if (!(t >= 0.0 && t <= 1.0))
    throw validation_error("zchannel_restricted_bound: t must be in [0,1]");
  Channel ch = zchannel(t);

  auto coupling_at = [](double a) {
    return std::vector<double>{a, 1.0 - a, 0.0, 1.0};
  };

  auto inner_min = [&](const ProbVector& px) {
    JointDist j = compose_joint(px, ch);
    detail::MarkovAlphaWork work(j, 2);
    double best_v = std::numeric_limits<double>::infinity();
    double best_a = 0.0;
    auto scan = [&](double lo, double hi, int n) {
      for (int i = 0; i <= n; ++i) {
        double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        double v = work.alpha_objective(coupling_at(a));
        if (v < best_v) { best_v = v; best_a = a; }
      }
    };
    scan(0.0, 1.0, std::max(1024, opts.grid_resolution));
    double w = 1.0 / static_cast<double>(std::max(1024, opts.grid_resolution));
    for (int level = 0; level < 8; ++level) {
      scan(std::max(0.0, best_a - w), std::min(1.0, best_a + w), 32);
      w /= 16.0;
    }
    return std::make_pair(best_v, best_a);
  };

  auto s = detail::golden_maximize(
      [&](double p1) { return inner_min(detail::binary_px(p1)).first; }, 0.0, 1.0, 1e-6);

  BoundResult res;
  res.arg_px = detail::binary_px(s.best_x);
  auto [v, a] = inner_min(res.arg_px);
  res.value = detail::snap_nonneg(std::min(v, s.best_value));
  res.arg_coupling = Coupling(2, 2, coupling_at(a));
  res.diagnostics.restarts = 1;
  res.diagnostics.converged = true;
  return res;
}

// min(1-t, t)/2: two Z-channel uses restricted to inputs {01, 10} act as a
// binary erasure channel with erasure probability t.
inline double erasure_lower_bound_z(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw validation_error("erasure_lower_bound_z: t must be in [0,1]");
  return std::min(1.0 - t, t) / 2.0;
}

// Source-model form: the source p(x,y) is fixed, so no outer maximization.
inline BoundResult source_model_bound(const JointDist& j, const OptimizerOptions& opts) {
  AlphaResult a = alpha_joint(j, opts);
  BoundResult res;
  res.value = detail::snap_nonneg(a.value);
  res.arg_px = j.row_marginal();
  res.arg_coupling = a.coupling;
  res.diagnostics = {opts.restarts, a.iterations, a.converged};
  return res;
}

struct SweepRow {
  double t = 0.0;
  double new_upper = 0.0;
  double ac13_upper = 0.0;
  double erasure_lower = 0.0;

  void validate() const {
    if (!(t >= 0.0 && t <= 1.0)) throw validation_error("SweepRow: t out of range");
    if (!(erasure_lower <= ac13_upper + 1e-6))
      throw validation_error("SweepRow: erasure lower bound exceeds the AC13 upper bound");
    if (!(new_upper <= ac13_upper + 1e-9))
      throw validation_error("SweepRow: new upper bound exceeds the AC13 upper bound");
  }
};

// One row per t: the new bound (restricted family by default, full-qcard
// search when full_qcard is set), the AC13 bound, and the erasure lower bound.
inline std::vector<SweepRow> zchannel_sweep(const std::vector<double>& t_values,
                                            const OptimizerOptions& opts,
                                            bool full_qcard = false) {
  check_options(opts);
  for (double t : t_values)
    if (!(t >= 0.0 && t <= 1.0))
      throw validation_error("zchannel_sweep: t=" + std::to_string(t) + " out of [0,1]");

  std::vector<SweepRow> rows(t_values.size());
  std::vector<std::string> errors(t_values.size());
  parallel_for(t_values.size(), [&](std::size_t i) {
    double t = t_values[i];
    try {
      OptimizerOptions point_opts = opts;
      point_opts.seed = derive_seed(opts.seed, i);
      Channel ch = zchannel(t);
      BoundResult nb = full_qcard ? new_upper_bound(ch, point_opts)
                                  : zchannel_restricted_bound(t, point_opts);
      BoundResult ac = ac13_bound(ch, point_opts);
      // the new bound's argmax is also a candidate for the AC13 outer max
      double ac_val = std::max(ac.value, ac13_objective(nb.arg_px, ch));
      rows[i] = {t, nb.value, ac_val, erasure_lower_bound_z(t)};
      rows[i].validate();
    } catch (const std::exception& e) {
      errors[i] = "t=" + std::to_string(t) + ": " + e.what();
    }
  });
  for (const auto& err : errors)
    if (!err.empty()) throw validation_error("zchannel_sweep: " + err);
  return rows;
}

// ---------------------------------------------------------------------------
// CSV schema: "t,new_upper,ac13_upper,erasure_lower", 9 significant digits.

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "t,new_upper,ac13_upper,erasure_lower\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n", r.t, r.new_upper, r.ac13_upper,
                  r.erasure_lower);
    out += buf;
  }
  return out;
}

inline std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,new_upper,ac13_upper,erasure_lower")
    throw parse_error("bad sweep CSV header", 1);
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    SweepRow r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.t, &r.new_upper, &r.ac13_upper,
                    &r.erasure_lower) != 4)
      throw parse_error("expected 4 comma-separated values", lineno);
    r.validate();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace otcap
