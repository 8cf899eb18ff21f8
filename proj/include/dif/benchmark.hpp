#ifndef DIF_BENCHMARK_HPP
#define DIF_BENCHMARK_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dif/iterated.hpp"

namespace dif {

struct SweepSpec {
  std::vector<double> q1_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  std::vector<double> sigma2_grid = {1e-2, 1e-1, 1.0, 1e1, 1e2};
  double q2 = 1e-2;
  double T = 1.0;
  int n_trajectories = 20;
  int n_targets_per_trajectory = 10;
  int K = 130;
  std::uint64_t master_seed = 1;
};

enum class Algo { EKF, UKF, DIEKF, DIUKF, DIPLF };

inline constexpr std::array<Algo, 5> kAlgoOrder = {
    Algo::EKF, Algo::UKF, Algo::DIEKF, Algo::DIUKF, Algo::DIPLF};

const char* algo_name(Algo a);
std::optional<Algo> parse_algo(std::string_view name);
// EKF for DIEKF, UKF for DIUKF/DIPLF, nothing for the baselines themselves.
std::optional<Algo> baseline_of(Algo a);

// Counter-based stream seeding: reproducible regardless of execution order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t config_index,
                          std::uint64_t trajectory, std::uint64_t target,
                          std::uint64_t stream);

inline constexpr std::uint64_t kStreamTrajectory = 1;
inline constexpr std::uint64_t kStreamMeasurement = 2;
inline constexpr std::uint64_t kStreamIllustrate = 10;

// Zero-mean draw with covariance L*L^T, L lower-triangular.
VectorXd sample_mvn(const MatrixXd& chol_lower, std::mt19937_64& rng);

struct Dataset {
  // trajectories[t] holds x_0..x_K (K+1 states).
  std::vector<std::vector<VectorXd>> trajectories;
  // measurements[t][g][k] is the measurement of x_{k+1} (K per run).
  std::vector<std::vector<std::vector<VectorXd>>> measurements;
};

// Truth shared across targets of a trajectory; targets differ only in their
// measurement noise. Trajectories differ across configs via config_index.
Dataset simulate(const CtParams& params, const SweepSpec& spec,
                 int config_index);

// Pooled over all runs, steps, and selected components: sqrt of the mean
// squared per-component error.
double rmse(const std::vector<VectorXd>& errors,
            const std::vector<int>& components);

inline constexpr std::array<int, 2> kPositionComponents = {0, 2};
inline constexpr std::array<int, 2> kVelocityComponents = {1, 3};

double relative_rmse(double iter, double base);

// Position RMSE strictly above the measurement noise std counts as diverged.
bool divergence_flag(double pos_rmse, double sigma2);

struct ConfigResult {
  double q1 = 0.0;
  double sigma2 = 0.0;
  Algo algo = Algo::EKF;
  double pos_rmse = 0.0;
  double vel_rmse = 0.0;
  bool diverged = false;
  std::optional<double> v_pos;  // empty for baselines
  std::optional<double> v_vel;
  std::uint64_t data_hash = 0;  // measurements consumed; not serialized
};

struct RmseReport {
  std::vector<ConfigResult> rows;  // q1-major, sigma2 inner, algorithm last
};

// dif_cfg supplies max_iters/tol; variant and sigma tuning are set per
// algorithm internally.
RmseReport run_sweep(const SweepSpec& spec,
                     const std::vector<Algo>& algorithms = {kAlgoOrder.begin(),
                                                            kAlgoOrder.end()},
                     const DifConfig& dif_cfg = DifConfig{});

extern const char* const kReportHeader;

void write_report_csv(const RmseReport& report, std::ostream& out);
// Throws std::runtime_error quoting the expected header on schema mismatch.
RmseReport read_report_csv(std::istream& in);

// (filename, content) pairs: one 5x5 V matrix per pair and metric, rows q1
// ascending, columns sigma2 ascending.
std::vector<std::pair<std::string, std::string>> matrix_csvs(
    const RmseReport& report);

// Text matrices, one per pair and metric: iterated/baseline RMSE per cell,
// "-" for a diverged side, V appended when available.
std::string render_report(const RmseReport& report);

// Per-algorithm divergence summary for terminal output.
std::string divergence_summary(const RmseReport& report);

// key=value lines, '#' comments; unknown keys or bad values are errors
// naming the key. Every key optional.
SweepSpec parse_sweep_config(std::istream& in);

std::string format_double(double v);  // shortest round-trip form

}  // namespace dif

#endif
