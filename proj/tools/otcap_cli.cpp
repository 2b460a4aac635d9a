// Command-line front end: channel bounds, the Z-channel sweep, verification
// suites, and the restricted tension frontier. Exit codes: 0 success,
// 1 verification failure, 2 I/O or parse error, 64 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otcap/otcap.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitIoError = 2;
constexpr int kExitUsage = 64;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw otcap::parse_error("cannot open '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw otcap::parse_error("cannot write '" + path + "'", 0);
  out << content;
  if (!out) throw otcap::parse_error("write failed for '" + path + "'", 0);
}

std::string format_px(const otcap::ProbVector& px) {
  std::string s = "[";
  char buf[32];
  for (std::size_t i = 0; i < px.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", px[i]);
    s += buf;
    if (i + 1 < px.size()) s += ", ";
  }
  return s + "]";
}

struct Knobs {
  std::size_t qcard = 0;  // 0 = default |X||Y|+2
  otcap::OptimizerOptions opts;

  void attach(CLI::App* cmd) {
    cmd->add_option("--qcard", qcard, "auxiliary alphabet size (default |X||Y|+2)");
    cmd->add_option("--restarts", opts.restarts, "optimizer restarts")->check(CLI::Range(1, 4096));
    cmd->add_option("--tol", opts.tol, "optimizer improvement tolerance");
    cmd->add_option("--max-iters", opts.max_iters, "optimizer iteration cap");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--grid-resolution", opts.grid_resolution, "outer grid denominator")
        ->check(CLI::Range(2, 1 << 20));
  }
};

int run_bound(const std::string& channel_path, const std::string& joint_path,
              const std::string& method, const Knobs& k) {
  using namespace otcap;
  if (!channel_path.empty()) {
    Channel ch = parse_channel(read_file(channel_path));
    std::size_t qcard = k.qcard ? k.qcard : ch.input_card * ch.output_card + 2;
    if (method == "new" || method == "both") {
      BoundResult r = new_upper_bound(ch, qcard, k.opts);
      std::printf("new_upper: %.6f bits/use\n", r.value);
      std::printf("  argmax p(x) = %s\n", format_px(r.arg_px).c_str());
    }
    if (method == "ac13" || method == "both") {
      BoundResult r = ac13_bound(ch, k.opts);
      std::printf("ac13_upper: %.6f bits/use\n", r.value);
      std::printf("  argmax p(x) = %s\n", format_px(r.arg_px).c_str());
    }
    return kExitOk;
  }
  // source model: the joint is fixed, no outer maximization
  JointDist j = parse_joint(read_file(joint_path));
  if (method == "new" || method == "both") {
    BoundResult r = source_model_bound(j, k.opts);
    std::printf("source_upper: %.6f bits/use\n", r.value);
  }
  if (method == "ac13" || method == "both") {
    double v = std::min(mutual_information(j), conditional_entropy(j));
    std::printf("min(I(X;Y),H(X|Y)): %.6f bits/use\n", v);
  }
  return kExitOk;
}

int run_sweep(int steps, const std::string& out_path, const std::string& svg_path, bool full,
              const Knobs& k) {
  using namespace otcap;
  std::vector<double> ts(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    ts[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(steps - 1);
  auto rows = zchannel_sweep(ts, k.opts, full);
  write_file(out_path, sweep_csv(rows));
  if (!svg_path.empty()) write_file(svg_path, sweep_svg(rows));
  std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
  return kExitOk;
}

int run_verify(long trials, std::uint64_t seed, const std::string& residuals_path) {
  using namespace otcap;
  std::vector<SuiteReport> reports;
  bool keep = !residuals_path.empty();
  reports.push_back(ot_floor_suite(1, trials, seed, keep));
  reports.push_back(ot_floor_suite(2, trials, seed ^ 0x5bd1e995ULL, keep));
  reports.push_back(ot_alpha_value_suite(seed));
  reports.push_back(subadditivity_suite(std::min<long>(trials, 100), seed, 64, 1e-2, keep));
  reports.push_back(alpha_epsilon_observation(seed));

  bool all_pass = true;
  for (const auto& r : reports) {
    std::printf("%s\n", format_suite_report(r).c_str());
    all_pass = all_pass && r.pass;
  }
  if (keep) {
    std::string csv = "suite,trial,residual\n";
    char buf[128];
    for (const auto& r : reports)
      for (std::size_t i = 0; i < r.residuals.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.9g\n", r.name.c_str(), i, r.residuals[i]);
        csv += buf;
      }
    write_file(residuals_path, csv);
  }
  return all_pass ? kExitOk : kExitVerifyFail;
}

int run_slice(const std::string& joint_path, int points, const std::string& out_path,
              const Knobs& k) {
  using namespace otcap;
  JointDist j = parse_joint(read_file(joint_path));
  std::size_t qcard = k.qcard ? k.qcard : alpha_max_qcard(j);
  auto pts = tension_slice(j, points, qcard, k.opts);
  std::string csv = "lambda,s2,s3\n";
  char buf[128];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", p.lambda, p.s2, p.s3);
    csv += buf;
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(out_path, csv);
    std::printf("wrote %zu points to %s\n", pts.size(), out_path.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oblivious-transfer capacity bounds for discrete memoryless channels"};
  app.require_subcommand(1);

  // bound
  auto* bound = app.add_subcommand("bound", "compute upper bounds for a channel or source");
  std::string channel_path, joint_path, method = "both";
  Knobs bound_knobs;
  auto* copt = bound->add_option("--channel", channel_path, "channel file");
  auto* jopt = bound->add_option("--joint", joint_path, "joint distribution file (source model)");
  copt->excludes(jopt);
  bound->add_option("--method", method, "new | ac13 | both")
      ->check(CLI::IsMember({"new", "ac13", "both"}));
  bound_knobs.attach(bound);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Z-channel bound sweep over t in [0,1]");
  int steps = 21;
  std::string out_path, svg_path;
  bool full = false;
  Knobs sweep_knobs;
  sweep->add_option("--steps", steps, "number of sweep points")->check(CLI::Range(2, 100000));
  sweep->add_option("--out", out_path, "output CSV path")->required();
  sweep->add_option("--svg", svg_path, "optional SVG chart path");
  sweep->add_flag("--full", full, "use the full-cardinality search instead of the restricted family");
  sweep_knobs.attach(sweep);

  // verify
  auto* verify = app.add_subcommand("verify", "run the inequality verification suites");
  long trials = 10000;
  std::uint64_t vseed = 0;
  std::string residuals_path;
  verify->add_option("--trials", trials, "random trials per suite")
      ->check(CLI::Range(1L, 100000000L));
  verify->add_option("--seed", vseed, "random seed");
  verify->add_option("--residuals-csv", residuals_path, "optional CSV of per-trial residuals");

  // slice
  auto* slice = app.add_subcommand("slice", "restricted tension frontier of a joint distribution");
  std::string slice_joint, slice_out;
  int points = 11;
  Knobs slice_knobs;
  slice->add_option("--joint", slice_joint, "joint distribution file")->required();
  slice->add_option("--points", points, "number of scalarization weights")
      ->check(CLI::Range(2, 10000));
  slice->add_option("--out", slice_out, "output CSV path (stdout if omitted)");
  slice_knobs.attach(slice);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (bound->parsed()) {
      if (channel_path.empty() && joint_path.empty()) {
        std::cerr << "bound: one of --channel / --joint is required\n";
        return kExitUsage;
      }
      return run_bound(channel_path, joint_path, method, bound_knobs);
    }
    if (sweep->parsed()) return run_sweep(steps, out_path, svg_path, full, sweep_knobs);
    if (verify->parsed()) return run_verify(trials, vseed, residuals_path);
    if (slice->parsed()) return run_slice(slice_joint, points, slice_out, slice_knobs);
  } catch (const otcap::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const otcap::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitUsage;
}
