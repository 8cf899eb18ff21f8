#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dif/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dynamically iterated filters: experiments and reports"};
  app.require_subcommand(1);

  int iters = 3;
  std::uint64_t ill_seed = 0;
  std::string ill_out = "illustrate_out";
  auto* illustrate = app.add_subcommand(
      "illustrate",
      "1-D cubic example: per-iteration densities and KL to grid truth");
  illustrate->add_option("--iters", iters, "total passes (iteration 0 included)")
      ->check(CLI::PositiveNumber);
  illustrate->add_option("--seed", ill_seed, "measurement sampling seed");
  illustrate->add_option("--out", ill_out, "output directory");

  std::string config_path;
  std::string track_out = "track_out";
  std::uint64_t track_seed = 0;
  std::vector<std::string> algo_names;
  auto* track = app.add_subcommand(
      "track", "coordinated-turn Monte Carlo sweep over the noise grid");
  track->add_option("--config", config_path, "sweep config file (key=value)");
  auto* seed_opt =
      track->add_option("--seed", track_seed, "master seed override");
  track->add_option("--out", track_out, "output directory");
  track
      ->add_option("--algorithms", algo_names,
                   "subset of ekf,ukf,diekf,diukf,diplf")
      ->delimiter(',');

  std::string report_path;
  auto* report =
      app.add_subcommand("report", "render V matrices from a report CSV");
  report->add_option("file", report_path, "report CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (illustrate->parsed()) {
      dif::cmd_illustrate(ill_out, iters, ill_seed);
    } else if (track->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = track_seed;
      dif::cmd_track(config_path, track_out, seed, algo_names);
    } else if (report->parsed()) {
      dif::cmd_report(report_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
