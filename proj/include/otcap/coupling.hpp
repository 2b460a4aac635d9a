#pragma once

#include <cstddef>
#include <vector>

#include "otcap/errors.hpp"
#include "otcap/prob.hpp"
#include "otcap/rng.hpp"

namespace otcap {

// Conditional distribution p(q|u): one simplex row per value of U.
struct Coupling {
  std::size_t ucard = 0, qcard = 0;
  std::vector<double> p;  // p[u*qcard + q]

  Coupling() = default;
  Coupling(std::size_t nu, std::size_t nq, std::vector<double> rows)
      : ucard(nu), qcard(nq), p(std::move(rows)) {
    if (ucard < 1 || qcard < 1 || p.size() != ucard * qcard)
      throw validation_error("Coupling: dimension mismatch");
    for (std::size_t u = 0; u < ucard; ++u) {
      std::vector<double> row(p.begin() + static_cast<long>(u * qcard),
                              p.begin() + static_cast<long>((u + 1) * qcard));
      detail::check_and_normalize(row, "Coupling row");
      for (std::size_t q = 0; q < qcard; ++q) p[u * qcard + q] = row[q];
    }
  }

  double at(std::size_t u, std::size_t q) const { return p[u * qcard + q]; }
};

// Q constant: all mass on q = 0.
inline Coupling constant_coupling(std::size_t ucard, std::size_t qcard) {
  std::vector<double> rows(ucard * qcard, 0.0);
  for (std::size_t u = 0; u < ucard; ++u) rows[u * qcard] = 1.0;
  return Coupling(ucard, qcard, std::move(rows));
}

// Q = U. Requires qcard >= ucard.
inline Coupling copy_coupling(std::size_t ucard, std::size_t qcard) {
  if (qcard < ucard) throw validation_error("copy_coupling: qcard < ucard");
  std::vector<double> rows(ucard * qcard, 0.0);
  for (std::size_t u = 0; u < ucard; ++u) rows[u * qcard + u] = 1.0;
  return Coupling(ucard, qcard, std::move(rows));
}

inline Coupling random_coupling(Rng& rng, std::size_t ucard, std::size_t qcard) {
  std::vector<double> rows;
  rows.reserve(ucard * qcard);
  for (std::size_t u = 0; u < ucard; ++u) {
    auto r = dirichlet_row(rng, qcard);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return Coupling(ucard, qcard, std::move(rows));
}

// p(u,v,q) = p(u,v) * p(q|u); the result carries the Markov flag.
inline JointDist3 extend_with_coupling(const JointDist& j, const Coupling& c) {
  if (c.ucard != j.nu)
    throw validation_error("extend_with_coupling: coupling rows do not match |U|");
  std::vector<double> t(j.nu * j.nv * c.qcard);
  for (std::size_t u = 0; u < j.nu; ++u)
    for (std::size_t v = 0; v < j.nv; ++v)
      for (std::size_t q = 0; q < c.qcard; ++q)
        t[(u * j.nv + v) * c.qcard + q] = j.at(u, v) * c.at(u, q);
  return JointDist3(j.nu, j.nv, c.qcard, std::move(t), /*markov=*/true);
}

}  // namespace otcap
