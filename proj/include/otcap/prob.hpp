#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "otcap/errors.hpp"

namespace otcap {

inline constexpr double kSimplexTol = 1e-12;   // accepted drift of a probability sum from 1
inline constexpr double kMarkovTol = 1e-10;    // accepted drift of p(q|u,v) from p(q|u)

// -p*log2(p), with 0*log(0) = 0.
inline double neg_plog2p(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

// H of any nonnegative array summing to 1, in bits.
inline double entropy_of(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) h += neg_plog2p(p);
  return h;
}

namespace detail {

// Entries must be >= 0 and sum to 1 within kSimplexTol; the vector is then
// renormalized in place. Anything else is rejected.
inline void check_and_normalize(std::vector<double>& p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw validation_error(std::string(what) + ": negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw validation_error(std::string(what) + ": entries sum to " + std::to_string(sum) +
                           ", expected 1");
  if (sum != 1.0 && sum > 0.0)
    for (double& v : p) v /= sum;
}

}  // namespace detail

// A point on a finite probability simplex.
struct ProbVector {
  std::vector<double> probs;

  ProbVector() = default;
  explicit ProbVector(std::vector<double> p) : probs(std::move(p)) {
    detail::check_and_normalize(probs, "ProbVector");
  }

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

inline double entropy(const ProbVector& p) { return entropy_of(p.probs); }

// Finite joint distribution p(u,v), row-major |U| x |V|.
struct JointDist {
  std::size_t nu = 0, nv = 0;
  std::vector<double> p;  // p[u*nv + v]

  JointDist() = default;
  JointDist(std::size_t nu_, std::size_t nv_, std::vector<double> p_)
      : nu(nu_), nv(nv_), p(std::move(p_)) {
    if (nu == 0 || nv == 0 || p.size() != nu * nv)
      throw validation_error("JointDist: dimension mismatch");
    detail::check_and_normalize(p, "JointDist");
  }

  double at(std::size_t u, std::size_t v) const { return p[u * nv + v]; }

  ProbVector row_marginal() const {  // p(u)
    std::vector<double> m(nu, 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v) m[u] += at(u, v);
    return ProbVector(std::move(m));
  }
  ProbVector col_marginal() const {  // p(v)
    std::vector<double> m(nv, 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v) m[v] += at(u, v);
    return ProbVector(std::move(m));
  }
};

inline double joint_entropy(const JointDist& j) { return entropy_of(j.p); }

// H(U|V) = H(U,V) - H(V), row variable given column variable.
inline double conditional_entropy(const JointDist& j) {
  return joint_entropy(j) - entropy(j.col_marginal());
}

// I(U;V) = H(U) + H(V) - H(U,V).
inline double mutual_information(const JointDist& j) {
  return entropy(j.row_marginal()) + entropy(j.col_marginal()) - joint_entropy(j);
}

// Finite triple distribution p(u,v,q). When markov_q_given_u is set the
// tensor was built as p(u,v)*p(q|u), so Q - U - V holds by construction.
struct JointDist3 {
  std::size_t nu = 0, nv = 0, nq = 0;
  std::vector<double> p;  // p[(u*nv + v)*nq + q]
  bool markov_q_given_u = false;

  JointDist3() = default;
  JointDist3(std::size_t nu_, std::size_t nv_, std::size_t nq_, std::vector<double> p_,
             bool markov = false)
      : nu(nu_), nv(nv_), nq(nq_), p(std::move(p_)), markov_q_given_u(markov) {
    if (nu == 0 || nv == 0 || nq == 0 || p.size() != nu * nv * nq)
      throw validation_error("JointDist3: dimension mismatch");
    detail::check_and_normalize(p, "JointDist3");
    if (markov_q_given_u) check_markov();
  }

  double at(std::size_t u, std::size_t v, std::size_t q) const {
    return p[(u * nv + v) * nq + q];
  }

  // Verifies p(q|u,v) is independent of v wherever p(u,v) > 0.
  void check_markov() const {
    for (std::size_t u = 0; u < nu; ++u) {
      double pu = 0.0;
      std::vector<double> puq(nq, 0.0);
      for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t q = 0; q < nq; ++q) {
          puq[q] += at(u, v, q);
          pu += at(u, v, q);
        }
      if (pu <= 0.0) continue;
      for (std::size_t v = 0; v < nv; ++v) {
        double puv = 0.0;
        for (std::size_t q = 0; q < nq; ++q) puv += at(u, v, q);
        if (puv <= 0.0) continue;
        for (std::size_t q = 0; q < nq; ++q)
          if (std::abs(at(u, v, q) / puv - puq[q] / pu) > kMarkovTol)
            throw validation_error("JointDist3: p(q|u,v) depends on v, Markov flag invalid");
      }
    }
  }
};

enum class Cmi {
  uv_given_q,  // I(U;V|Q)
  uq_given_v,  // I(U;Q|V)
  vq_given_u,  // I(V;Q|U)
};

namespace detail {

struct TripleEntropies {
  double h_uvq, h_uv, h_uq, h_vq, h_u, h_v, h_q;
};

inline TripleEntropies triple_entropies(const JointDist3& j) {
  std::vector<double> uv(j.nu * j.nv, 0.0), uq(j.nu * j.nq, 0.0), vq(j.nv * j.nq, 0.0);
  std::vector<double> mu(j.nu, 0.0), mv(j.nv, 0.0), mq(j.nq, 0.0);
  double h_uvq = 0.0;
  for (std::size_t u = 0; u < j.nu; ++u)
    for (std::size_t v = 0; v < j.nv; ++v)
      for (std::size_t q = 0; q < j.nq; ++q) {
        double t = j.at(u, v, q);
        h_uvq += neg_plog2p(t);
        uv[u * j.nv + v] += t;
        uq[u * j.nq + q] += t;
        vq[v * j.nq + q] += t;
        mu[u] += t;
        mv[v] += t;
        mq[q] += t;
      }
  return {h_uvq,          entropy_of(uv), entropy_of(uq), entropy_of(vq),
          entropy_of(mu), entropy_of(mv), entropy_of(mq)};
}

}  // namespace detail

inline double conditional_mutual_information(const JointDist3& j, Cmi which) {
  auto e = detail::triple_entropies(j);
  switch (which) {
    case Cmi::uv_given_q: return e.h_uq + e.h_vq - e.h_q - e.h_uvq;
    case Cmi::uq_given_v: return e.h_uv + e.h_vq - e.h_v - e.h_uvq;
    case Cmi::vq_given_u: return e.h_uv + e.h_uq - e.h_u - e.h_uvq;
  }
  throw validation_error("conditional_mutual_information: bad selector");
}

// ---------------------------------------------------------------------------
// Joint-distribution text format: line 1 = "<|U|> <|V|>", then |U| lines of
// |V| whitespace-separated decimal floats.

inline JointDist parse_joint(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw parse_error("empty input, expected header", 1);
  ++lineno;
  std::istringstream hdr(line);
  long nu = 0, nv = 0;
  if (!(hdr >> nu >> nv) || nu < 1 || nv < 1)
    throw parse_error("expected header \"<|U|> <|V|>\"", lineno);
  std::vector<double> cells;
  cells.reserve(static_cast<std::size_t>(nu * nv));
  for (long u = 0; u < nu; ++u) {
    if (!std::getline(in, line)) throw parse_error("unexpected end of input", lineno + 1);
    ++lineno;
    std::istringstream row(line);
    for (long v = 0; v < nv; ++v) {
      double x;
      if (!(row >> x)) throw parse_error("expected " + std::to_string(nv) + " values", lineno);
      if (std::isnan(x)) throw parse_error("NaN entry", lineno);
      if (x < 0.0) throw parse_error("negative entry", lineno);
      cells.push_back(x);
    }
  }
  try {
    return JointDist(static_cast<std::size_t>(nu), static_cast<std::size_t>(nv),
                     std::move(cells));
  } catch (const validation_error& e) {
    throw parse_error(e.what(), 0);
  }
}

inline JointDist parse_joint(const std::string& text) {
  std::istringstream in(text);
  return parse_joint(in);
}

}  // namespace otcap
