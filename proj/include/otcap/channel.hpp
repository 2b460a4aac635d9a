#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "otcap/errors.hpp"
#include "otcap/prob.hpp"

namespace otcap {

// Discrete memoryless channel: row-stochastic p(y|x) over finite alphabets.
struct Channel {
  std::size_t input_card = 0, output_card = 0;
  std::vector<double> p;  // p[x*output_card + y]

  Channel() = default;
  Channel(std::size_t nx, std::size_t ny, std::vector<double> rows)
      : input_card(nx), output_card(ny), p(std::move(rows)) {
    if (input_card < 1 || output_card < 1 || p.size() != input_card * output_card)
      throw validation_error("Channel: dimension mismatch");
    for (std::size_t x = 0; x < input_card; ++x) {
      std::vector<double> row(p.begin() + static_cast<long>(x * output_card),
                              p.begin() + static_cast<long>((x + 1) * output_card));
      detail::check_and_normalize(row, "Channel row");
      for (std::size_t y = 0; y < output_card; ++y) p[x * output_card + y] = row[y];
    }
  }

  double at(std::size_t x, std::size_t y) const { return p[x * output_card + y]; }
};

enum class ChannelKind { zchannel, bec, bsc };

// zchannel(t) = [[1,0],[t,1-t]]; bsc(p) = [[1-p,p],[p,1-p]];
// bec(t) = 2x3 with the erasure symbol at output index 1.
inline Channel standard_channel(ChannelKind kind, double param) {
  if (!(param >= 0.0 && param <= 1.0))
    throw validation_error("standard_channel: parameter must be in [0,1]");
  switch (kind) {
    case ChannelKind::zchannel:
      return Channel(2, 2, {1.0, 0.0, param, 1.0 - param});
    case ChannelKind::bsc:
      return Channel(2, 2, {1.0 - param, param, param, 1.0 - param});
    case ChannelKind::bec:
      return Channel(2, 3, {1.0 - param, param, 0.0, 0.0, param, 1.0 - param});
  }
  throw validation_error("standard_channel: bad kind");
}

inline Channel zchannel(double t) { return standard_channel(ChannelKind::zchannel, t); }

// p(x,y) = p(x) * p(y|x).
inline JointDist compose_joint(const ProbVector& px, const Channel& ch) {
  if (px.size() != ch.input_card)
    throw validation_error("compose_joint: input distribution does not match channel");
  std::vector<double> cells(ch.input_card * ch.output_card);
  for (std::size_t x = 0; x < ch.input_card; ++x)
    for (std::size_t y = 0; y < ch.output_card; ++y)
      cells[x * ch.output_card + y] = px[x] * ch.at(x, y);
  return JointDist(ch.input_card, ch.output_card, std::move(cells));
}

// ---------------------------------------------------------------------------
// Channel file format: UTF-8, line 1 = "<|X|> <|Y|>", then |X| lines of |Y|
// whitespace-separated decimal floats; '#' begins a comment line.

inline Channel parse_channel(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_data_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t i = line.find_first_not_of(" \t\r");
      if (i == std::string::npos) continue;  // blank
      if (line[i] == '#') continue;          // comment
      out = line;
      return true;
    }
    return false;
  };

  std::string data;
  if (!next_data_line(data)) throw parse_error("empty input, expected header", 1);
  std::istringstream hdr(data);
  long nx = 0, ny = 0;
  if (!(hdr >> nx >> ny) || nx < 1 || ny < 1)
    throw parse_error("expected header \"<|X|> <|Y|>\"", lineno);

  std::vector<double> cells;
  cells.reserve(static_cast<std::size_t>(nx * ny));
  for (long x = 0; x < nx; ++x) {
    if (!next_data_line(data))
      throw parse_error("unexpected end of input, expected " + std::to_string(nx) + " rows",
                        lineno + 1);
    std::istringstream row(data);
    double sum = 0.0;
    for (long y = 0; y < ny; ++y) {
      double v;
      if (!(row >> v)) throw parse_error("expected " + std::to_string(ny) + " values", lineno);
      if (std::isnan(v)) throw parse_error("NaN entry", lineno);
      if (v < 0.0) throw parse_error("negative entry", lineno);
      cells.push_back(v);
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol)
      throw parse_error("row sums to " + std::to_string(sum) + ", expected 1", lineno);
  }
  return Channel(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny), std::move(cells));
}

inline Channel parse_channel(const std::string& text) {
  std::istringstream in(text);
  return parse_channel(in);
}

// Canonical form: 12 significant digits, one row per input, LF endings.
inline std::string serialize_channel(const Channel& ch) {
  std::string out = std::to_string(ch.input_card) + " " + std::to_string(ch.output_card) + "\n";
  char buf[64];
  for (std::size_t x = 0; x < ch.input_card; ++x) {
    for (std::size_t y = 0; y < ch.output_card; ++y) {
      std::snprintf(buf, sizeof buf, "%.12g", ch.at(x, y));
      out += buf;
      out += (y + 1 < ch.output_card) ? ' ' : '\n';
    }
  }
  return out;
}

struct ChannelDiagnostics {
  std::vector<double> row_sums;
  std::vector<std::size_t> zero_columns;  // unreachable outputs
  bool noiseless = false;                 // deterministic injective map
  bool useless = false;                   // all rows identical
};

inline ChannelDiagnostics validate_channel(const Channel& ch) {
  ChannelDiagnostics d;
  d.row_sums.resize(ch.input_card, 0.0);
  for (std::size_t x = 0; x < ch.input_card; ++x)
    for (std::size_t y = 0; y < ch.output_card; ++y) d.row_sums[x] += ch.at(x, y);

  for (std::size_t y = 0; y < ch.output_card; ++y) {
    double col = 0.0;
    for (std::size_t x = 0; x < ch.input_card; ++x) col += ch.at(x, y);
    if (col == 0.0) d.zero_columns.push_back(y);
  }

  d.noiseless = true;
  std::vector<long> image(ch.input_card, -1);
  for (std::size_t x = 0; x < ch.input_card && d.noiseless; ++x) {
    for (std::size_t y = 0; y < ch.output_card; ++y) {
      double v = ch.at(x, y);
      if (v == 1.0) image[x] = static_cast<long>(y);
      else if (v != 0.0) { d.noiseless = false; break; }
    }
    if (image[x] < 0) d.noiseless = false;
    for (std::size_t x2 = 0; x2 < x; ++x2)
      if (image[x2] == image[x]) d.noiseless = false;
  }

  d.useless = true;
  for (std::size_t x = 1; x < ch.input_card && d.useless; ++x)
    for (std::size_t y = 0; y < ch.output_card; ++y)
      if (std::abs(ch.at(x, y) - ch.at(0, y)) > kSimplexTol) { d.useless = false; break; }

  return d;
}

}  // namespace otcap
