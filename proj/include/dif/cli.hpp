#ifndef DIF_CLI_HPP
#define DIF_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dif {

// 1-D cubic example: per-iteration density CSVs, the grid-truth posterior,
// and a per-iteration KL summary. iters counts total passes (iteration 0
// included); the measurement is sampled from the model under `seed`.
void cmd_illustrate(const std::string& out_dir, int iters, std::uint64_t seed);

// Monte Carlo sweep over the coordinated-turn noise grid; writes report.csv
// plus one V-matrix CSV per algorithm pair and metric, and prints a
// divergence summary. Empty config path means defaults; empty algorithm
// list means all five.
void cmd_track(const std::string& config_path, const std::string& out_dir,
               std::optional<std::uint64_t> seed_override,
               const std::vector<std::string>& algorithm_names);

// Render the V matrices of an existing report CSV to standard output.
void cmd_report(const std::string& report_path);

}  // namespace dif

#endif
