#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "otcap/otcap.hpp"
#include "test_util.hpp"

using namespace otcap;
using Catch::Approx;

TEST_CASE("standard channels") {
  Channel z = standard_channel(ChannelKind::zchannel, 0.3);
  CHECK(z.at(0, 0) == 1.0);
  CHECK(z.at(0, 1) == 0.0);
  CHECK(z.at(1, 0) == 0.3);
  CHECK(z.at(1, 1) == 0.7);

  Channel b = standard_channel(ChannelKind::bsc, 0.1);
  CHECK(b.at(0, 0) == 0.9);
  CHECK(b.at(0, 1) == 0.1);
  CHECK(b.at(1, 0) == 0.1);
  CHECK(b.at(1, 1) == 0.9);

  Channel e = standard_channel(ChannelKind::bec, 0.25);
  REQUIRE(e.output_card == 3);
  CHECK(e.at(0, 0) == 0.75);
  CHECK(e.at(0, 1) == 0.25);  // erasure column
  CHECK(e.at(0, 2) == 0.0);
  CHECK(e.at(1, 0) == 0.0);
  CHECK(e.at(1, 1) == 0.25);
  CHECK(e.at(1, 2) == 0.75);

  CHECK_THROWS_AS(standard_channel(ChannelKind::bsc, 1.2), validation_error);
  CHECK_THROWS_AS(standard_channel(ChannelKind::zchannel, -0.01), validation_error);
}

TEST_CASE("channel parsing") {
  Channel z = parse_channel("2 2\n1 0\n0.3 0.7\n");
  CHECK(z.at(1, 0) == 0.3);
  CHECK(z.at(1, 1) == 0.7);

  // comments and blank lines are skipped
  Channel c = parse_channel("# a Z-channel\n2 2\n\n1 0\n# noisy row\n0.3 0.7\n");
  CHECK(c.at(1, 0) == 0.3);

  Channel trivial = parse_channel("1 1\n1\n");
  CHECK(trivial.input_card == 1);
  CHECK(trivial.at(0, 0) == 1.0);

  try {
    parse_channel("2 2\n0.5 0.6\n0.3 0.7\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 2);  // row sums to 1.1
  }

  CHECK_THROWS_AS(parse_channel(""), parse_error);
  CHECK_THROWS_AS(parse_channel("2\n1 0\n0 1\n"), parse_error);
  CHECK_THROWS_AS(parse_channel("2 2\n1 0\n"), parse_error);
  CHECK_THROWS_AS(parse_channel("2 2\n1 0\n0.3 -0.7\n"), parse_error);
  CHECK_THROWS_AS(parse_channel("2 2\n1 0\nnan 1\n"), parse_error);
}

TEST_CASE("serialize then parse is the identity on canonical output") {
  Rng rng(41);
  for (int i = 0; i < 60; ++i) {
    std::size_t nx = 1 + i % 3, ny = 1 + (i / 3) % 4;
    // random stochastic matrix with entries rounded to 12 decimals
    std::vector<double> rows;
    for (std::size_t x = 0; x < nx; ++x) {
      auto r = dirichlet_row(rng, ny);
      double sum = 0.0;
      for (std::size_t y = 0; y + 1 < ny; ++y) {
        r[y] = std::round(r[y] * 1e12) / 1e12;
        sum += r[y];
      }
      r[ny - 1] = 1.0 - sum;
      if (r[ny - 1] < 0.0) r[ny - 1] = 0.0;  // rare rounding spill
      rows.insert(rows.end(), r.begin(), r.end());
    }
    Channel ch(nx, ny, rows);
    std::string text = serialize_channel(ch);
    Channel back = parse_channel(text);
    CHECK(serialize_channel(back) == text);
  }
}

TEST_CASE("channel diagnostics") {
  ChannelDiagnostics ident = validate_channel(Channel(2, 2, {1, 0, 0, 1}));
  CHECK(ident.noiseless);
  CHECK_FALSE(ident.useless);
  CHECK(ident.zero_columns.empty());

  ChannelDiagnostics useless = validate_channel(zchannel(1.0));
  CHECK(useless.useless);
  CHECK_FALSE(useless.noiseless);
  CHECK(useless.zero_columns.size() == 1);  // output 1 unreachable

  ChannelDiagnostics mid = validate_channel(zchannel(0.5));
  CHECK_FALSE(mid.noiseless);
  CHECK_FALSE(mid.useless);

  // constant channel: deterministic but not injective
  ChannelDiagnostics constant = validate_channel(Channel(2, 2, {1, 0, 1, 0}));
  CHECK_FALSE(constant.noiseless);
  CHECK(constant.useless);
}

TEST_CASE("standard channels validate cleanly") {
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (auto kind : {ChannelKind::zchannel, ChannelKind::bsc, ChannelKind::bec}) {
      Channel ch = standard_channel(kind, t);
      ChannelDiagnostics d = validate_channel(ch);
      for (double s : d.row_sums) CHECK(s == Approx(1.0).margin(1e-12));
    }
  }
}
