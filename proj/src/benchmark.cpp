#include "dif/benchmark.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dif {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

std::uint64_t hash_vector(std::uint64_t h, const VectorXd& v) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
  const std::size_t len = sizeof(double) * static_cast<std::size_t>(v.size());
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void validate_spec(const SweepSpec& spec) {
  if (spec.q1_grid.empty() || spec.sigma2_grid.empty()) {
    throw std::invalid_argument("sweep spec: noise grids must be nonempty");
  }
  if (spec.n_trajectories < 1 || spec.n_targets_per_trajectory < 1 ||
      spec.K < 1) {
    throw std::invalid_argument("sweep spec: counts must be at least 1");
  }
  if (!(spec.T > 0.0) || !(spec.q2 > 0.0)) {
    throw std::invalid_argument("sweep spec: T and q2 must be positive");
  }
}

double parse_double_field(std::string_view s, const std::string& what) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || p != end) {
    throw std::runtime_error(what + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

struct AlgoOutcome {
  std::vector<VectorXd> errors;
  std::uint64_t hash = kFnvOffset;
  bool hard_failure = false;
};

AlgoOutcome run_algo(Algo algo, const Dataset& data, const Gaussian& prior,
                     const StateSpaceModel& model, const DifConfig& dif_cfg,
                     const SigmaConfig& sigma) {
  AlgoOutcome out;
  std::size_t total = 0;
  for (const auto& targets : data.measurements) {
    for (const auto& ys : targets) total += ys.size();
  }
  out.errors.reserve(total);

  for (std::size_t t = 0; t < data.measurements.size(); ++t) {
    const auto& truth = data.trajectories[t];
    for (const auto& ys : data.measurements[t]) {
      for (const VectorXd& y : ys) out.hash = hash_vector(out.hash, y);
      try {
        FilterRun run;
        switch (algo) {
          case Algo::EKF:
            run = baseline_filter(prior, model, ys, Baseline::EKF, sigma);
            break;
          case Algo::UKF:
            run = baseline_filter(prior, model, ys, Baseline::UKF, sigma);
            break;
          default: {
            DifConfig cfg = dif_cfg;
            cfg.sigma = sigma;
            cfg.variant = algo == Algo::DIEKF   ? Variant::DIEKF
                          : algo == Algo::DIUKF ? Variant::DIUKF
                                                : Variant::DIPLF;
            run = dif_filter(prior, model, ys, cfg);
            break;
          }
        }
        for (std::size_t k = 0; k < ys.size(); ++k) {
          out.errors.push_back(run.posteriors[k].mean() - truth[k + 1]);
        }
      } catch (const std::exception&) {
        out.hard_failure = true;  // counted as diverged, sweep continues
      }
    }
  }
  return out;
}

struct AlgoPair {
  Algo iterated;
  Algo baseline;
};

constexpr std::array<AlgoPair, 3> kPairs = {{{Algo::DIEKF, Algo::EKF},
                                             {Algo::DIUKF, Algo::UKF},
                                             {Algo::DIPLF, Algo::UKF}}};

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

const ConfigResult* find_row(const RmseReport& report, double q1,
                             double sigma2, Algo algo) {
  for (const ConfigResult& r : report.rows) {
    if (r.q1 == q1 && r.sigma2 == sigma2 && r.algo == algo) return &r;
  }
  return nullptr;
}

bool has_algo(const RmseReport& report, Algo algo) {
  return std::any_of(report.rows.begin(), report.rows.end(),
                     [&](const ConfigResult& r) { return r.algo == algo; });
}

std::string format_v(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

const char* const kReportHeader =
    "q1,sigma2,algorithm,pos_rmse,vel_rmse,diverged,V_pos,V_vel";

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::EKF: return "ekf";
    case Algo::UKF: return "ukf";
    case Algo::DIEKF: return "diekf";
    case Algo::DIUKF: return "diukf";
    case Algo::DIPLF: return "diplf";
  }
  return "?";
}

std::optional<Algo> parse_algo(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (Algo a : kAlgoOrder) {
    if (lower == algo_name(a)) return a;
  }
  return std::nullopt;
}

std::optional<Algo> baseline_of(Algo a) {
  switch (a) {
    case Algo::DIEKF: return Algo::EKF;
    case Algo::DIUKF:
    case Algo::DIPLF: return Algo::UKF;
    default: return std::nullopt;
  }
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t config_index,
                          std::uint64_t trajectory, std::uint64_t target,
                          std::uint64_t stream) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ config_index);
  h = splitmix64(h ^ trajectory);
  h = splitmix64(h ^ target);
  h = splitmix64(h ^ stream);
  return h;
}

VectorXd sample_mvn(const MatrixXd& chol_lower, std::mt19937_64& rng) {
  if (chol_lower.rows() != chol_lower.cols()) {
    throw DimensionError("sample_mvn: factor must be square");
  }
  std::normal_distribution<double> nd;  // fresh per call: no carried state
  VectorXd z(chol_lower.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(rng);
  return chol_lower * z;
}

Dataset simulate(const CtParams& params, const SweepSpec& spec,
                 int config_index) {
  validate_spec(spec);
  const Gaussian prior = ct_initial_prior();
  const MatrixXd lp = chol_psd(prior.cov());
  const MatrixXd lq = chol_psd(ct_process_noise(params.q1, params.q2, params.T));
  const MatrixXd h = ct_measurement_matrix();
  const MatrixXd lr =
      std::sqrt(params.sigma2) * MatrixXd::Identity(h.rows(), h.rows());

  Dataset data;
  data.trajectories.resize(spec.n_trajectories);
  data.measurements.resize(spec.n_trajectories);

  for (int t = 0; t < spec.n_trajectories; ++t) {
    std::mt19937_64 rng(derive_seed(spec.master_seed,
                                    static_cast<std::uint64_t>(config_index), t,
                                    0, kStreamTrajectory));
    auto& traj = data.trajectories[t];
    traj.reserve(spec.K + 1);
    traj.push_back(prior.mean() + sample_mvn(lp, rng));
    for (int k = 0; k < spec.K; ++k) {
      VectorXd next = ct_transition_matrix(traj.back()(4), params.T) *
                          traj.back() +
                      sample_mvn(lq, rng);
      traj.push_back(std::move(next));
    }

    auto& targets = data.measurements[t];
    targets.resize(spec.n_targets_per_trajectory);
    for (int g = 0; g < spec.n_targets_per_trajectory; ++g) {
      std::mt19937_64 mrng(derive_seed(spec.master_seed,
                                       static_cast<std::uint64_t>(config_index),
                                       t, g, kStreamMeasurement));
      auto& ys = targets[g];
      ys.reserve(spec.K);
      for (int k = 1; k <= spec.K; ++k) {
        ys.push_back(h * traj[k] + sample_mvn(lr, mrng));
      }
    }
  }
  return data;
}

double rmse(const std::vector<VectorXd>& errors,
            const std::vector<int>& components) {
  if (errors.empty()) throw std::invalid_argument("rmse: empty error set");
  if (components.empty()) {
    throw std::invalid_argument("rmse: no components selected");
  }
  double sum = 0.0;
  for (const VectorXd& e : errors) {
    for (int c : components) {
      if (c < 0 || c >= e.size()) {
        throw DimensionError("rmse: component index out of range");
      }
      sum += e(c) * e(c);
    }
  }
  // per-scalar normalization: raw position measurements then score exactly
  // sigma, which is the reference level the divergence flag compares against
  const double n = static_cast<double>(errors.size()) *
                   static_cast<double>(components.size());
  return std::sqrt(sum / n);
}

double relative_rmse(double iter, double base) {
  if (std::isnan(iter) || std::isnan(base)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (base > 0.0) return iter / base;
  return iter > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

bool divergence_flag(double pos_rmse, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("divergence_flag: sigma2 must be positive");
  }
  return pos_rmse > std::sqrt(sigma2);
}

RmseReport run_sweep(const SweepSpec& spec, const std::vector<Algo>& algorithms,
                     const DifConfig& dif_cfg) {
  validate_spec(spec);
  std::vector<Algo> algos;
  for (Algo a : kAlgoOrder) {
    if (std::find(algorithms.begin(), algorithms.end(), a) !=
        algorithms.end()) {
      algos.push_back(a);
    }
  }
  if (algos.empty()) {
    throw std::invalid_argument("run_sweep: no algorithms selected");
  }

  const Gaussian prior = ct_initial_prior();
  const SigmaConfig sigma = SigmaConfig::for_dimension(5);
  const std::vector<int> pos(kPositionComponents.begin(),
                             kPositionComponents.end());
  const std::vector<int> vel(kVelocityComponents.begin(),
                             kVelocityComponents.end());

  RmseReport report;
  int config_index = 0;
  for (double q1 : spec.q1_grid) {
    for (double sigma2 : spec.sigma2_grid) {
      const CtParams params{
          .T = spec.T, .q1 = q1, .q2 = spec.q2, .sigma2 = sigma2};
      const StateSpaceModel model = ct_model(params);
      const Dataset data = simulate(params, spec, config_index);

      std::vector<ConfigResult> rows;
      rows.reserve(algos.size());
      for (Algo algo : algos) {
        AlgoOutcome outcome =
            run_algo(algo, data, prior, model, dif_cfg, sigma);
        ConfigResult r;
        r.q1 = q1;
        r.sigma2 = sigma2;
        r.algo = algo;
        r.data_hash = outcome.hash;
        if (outcome.errors.empty()) {
          r.pos_rmse = std::numeric_limits<double>::quiet_NaN();
          r.vel_rmse = std::numeric_limits<double>::quiet_NaN();
        } else {
          r.pos_rmse = rmse(outcome.errors, pos);
          r.vel_rmse = rmse(outcome.errors, vel);
        }
        r.diverged = outcome.hard_failure || !std::isfinite(r.pos_rmse) ||
                     divergence_flag(r.pos_rmse, sigma2);
        rows.push_back(std::move(r));
      }

      for (ConfigResult& r : rows) {
        const auto base = baseline_of(r.algo);
        if (!base) continue;
        const auto it = std::find_if(
            rows.begin(), rows.end(),
            [&](const ConfigResult& c) { return c.algo == *base; });
        if (it == rows.end()) continue;  // baseline not requested
        r.v_pos = relative_rmse(r.pos_rmse, it->pos_rmse);
        r.v_vel = relative_rmse(r.vel_rmse, it->vel_rmse);
      }

      for (ConfigResult& r : rows) report.rows.push_back(std::move(r));
      ++config_index;
    }
  }
  return report;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

void write_report_csv(const RmseReport& report, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const ConfigResult& r : report.rows) {
    out << format_double(r.q1) << ',' << format_double(r.sigma2) << ','
        << algo_name(r.algo) << ',' << format_double(r.pos_rmse) << ','
        << format_double(r.vel_rmse) << ',' << (r.diverged ? '1' : '0') << ','
        << (r.v_pos ? format_double(*r.v_pos) : std::string()) << ','
        << (r.v_vel ? format_double(*r.v_vel) : std::string()) << '\n';
  }
}

RmseReport read_report_csv(std::istream& in) {
  const std::string schema_error =
      std::string("report schema mismatch; expected header: ") + kReportHeader;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(schema_error);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportHeader) throw std::runtime_error(schema_error);

  RmseReport report;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 8) {
      throw std::runtime_error("report row has " +
                               std::to_string(fields.size()) +
                               " fields; expected 8: '" + line + "'");
    }
    ConfigResult r;
    r.q1 = parse_double_field(fields[0], "report q1");
    r.sigma2 = parse_double_field(fields[1], "report sigma2");
    const auto algo = parse_algo(fields[2]);
    if (!algo) {
      throw std::runtime_error("report: unknown algorithm '" +
                               std::string(fields[2]) + "'");
    }
    r.algo = *algo;
    r.pos_rmse = parse_double_field(fields[3], "report pos_rmse");
    r.vel_rmse = parse_double_field(fields[4], "report vel_rmse");
    if (fields[5] == "0") {
      r.diverged = false;
    } else if (fields[5] == "1") {
      r.diverged = true;
    } else {
      throw std::runtime_error("report: diverged flag must be 0 or 1, got '" +
                               std::string(fields[5]) + "'");
    }
    if (!fields[6].empty()) {
      r.v_pos = parse_double_field(fields[6], "report V_pos");
    }
    if (!fields[7].empty()) {
      r.v_vel = parse_double_field(fields[7], "report V_vel");
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

std::vector<std::pair<std::string, std::string>> matrix_csvs(
    const RmseReport& report) {
  std::vector<double> q1s, s2s;
  for (const ConfigResult& r : report.rows) {
    q1s.push_back(r.q1);
    s2s.push_back(r.sigma2);
  }
  q1s = sorted_unique(std::move(q1s));
  s2s = sorted_unique(std::move(s2s));

  std::vector<std::pair<std::string, std::string>> files;
  for (const AlgoPair& pair : kPairs) {
    if (!has_algo(report, pair.iterated) || !has_algo(report, pair.baseline)) {
      continue;
    }
    for (const bool position : {true, false}) {
      std::string name = std::string("v_") + (position ? "pos" : "vel") + "_" +
                         algo_name(pair.iterated) + "_vs_" +
                         algo_name(pair.baseline) + ".csv";
      std::ostringstream out;
      out << "q1";
      for (double s2 : s2s) out << ',' << format_double(s2);
      out << '\n';
      for (double q1 : q1s) {
        out << format_double(q1);
        for (double s2 : s2s) {
          out << ',';
          const ConfigResult* row = find_row(report, q1, s2, pair.iterated);
          const auto v = row ? (position ? row->v_pos : row->v_vel)
                             : std::nullopt;
          if (v) out << format_double(*v);
        }
        out << '\n';
      }
      files.emplace_back(std::move(name), out.str());
    }
  }
  return files;
}

std::string render_report(const RmseReport& report) {
  std::vector<double> q1s, s2s;
  for (const ConfigResult& r : report.rows) {
    q1s.push_back(r.q1);
    s2s.push_back(r.sigma2);
  }
  q1s = sorted_unique(std::move(q1s));
  s2s = sorted_unique(std::move(s2s));

  std::ostringstream out;
  bool first_block = true;
  for (const AlgoPair& pair : kPairs) {
    if (!has_algo(report, pair.iterated) || !has_algo(report, pair.baseline)) {
      continue;
    }
    for (const bool position : {true, false}) {
      if (!first_block) out << '\n';
      first_block = false;
      out << algo_name(pair.iterated) << " vs " << algo_name(pair.baseline)
          << " -- " << (position ? "position" : "velocity")
          << " RMSE (iterated/baseline, V = ratio; '-' marks divergence)\n";

      // Build all cells first, then pad columns for alignment.
      std::vector<std::vector<std::string>> table;
      std::vector<std::string> header;
      header.push_back("q1\\sigma2");
      for (double s2 : s2s) header.push_back(format_double(s2));
      table.push_back(std::move(header));
      for (double q1 : q1s) {
        std::vector<std::string> row;
        row.push_back(format_double(q1));
        for (double s2 : s2s) {
          const ConfigResult* it = find_row(report, q1, s2, pair.iterated);
          const ConfigResult* base = find_row(report, q1, s2, pair.baseline);
          if (!it || !base) {
            row.push_back("");
            continue;
          }
          const double iv = position ? it->pos_rmse : it->vel_rmse;
          const double bv = position ? base->pos_rmse : base->vel_rmse;
          std::string cell = (it->diverged ? "-" : format_double(iv)) + "/" +
                             (base->diverged ? "-" : format_double(bv));
          const auto v = position ? it->v_pos : it->v_vel;
          if (v && !it->diverged && !base->diverged) {
            cell += " V=" + format_v(*v);
          }
          row.push_back(std::move(cell));
        }
        table.push_back(std::move(row));
      }

      std::vector<std::size_t> widths(table[0].size(), 0);
      for (const auto& row : table) {
        for (std::size_t c = 0; c < row.size(); ++c) {
          widths[c] = std::max(widths[c], row[c].size());
        }
      }
      for (const auto& row : table) {
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (c > 0) out << " | ";
          out << row[c]
              << std::string(widths[c] - row[c].size(), ' ');
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

std::string divergence_summary(const RmseReport& report) {
  std::vector<double> q1s, s2s;
  for (const ConfigResult& r : report.rows) {
    q1s.push_back(r.q1);
    s2s.push_back(r.sigma2);
  }
  q1s = sorted_unique(std::move(q1s));
  s2s = sorted_unique(std::move(s2s));

  std::ostringstream out;
  out << "divergence map (rows: q1 ascending; columns: sigma2 ascending; "
         "D = diverged)\n";
  for (Algo algo : kAlgoOrder) {
    if (!has_algo(report, algo)) continue;
    int diverged = 0;
    int total = 0;
    std::ostringstream map;
    for (double q1 : q1s) {
      map << "  ";
      for (double s2 : s2s) {
        const ConfigResult* row = find_row(report, q1, s2, algo);
        if (!row) {
          map << " ?";
          continue;
        }
        ++total;
        if (row->diverged) ++diverged;
        map << ' ' << (row->diverged ? 'D' : '.');
      }
      map << '\n';
    }
    out << algo_name(algo) << ": " << diverged << "/" << total
        << " configurations diverged\n"
        << map.str();
  }
  return out.str();
}

SweepSpec parse_sweep_config(std::istream& in) {
  SweepSpec spec;
  std::string line;
  int lineno = 0;

  const auto parse_list = [](const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (std::string_view field : split_fields(value)) {
      const std::string item = trim(field);
      if (item.empty()) {
        throw std::runtime_error("sweep config: empty entry in list for key '" +
                                 key + "'");
      }
      out.push_back(
          parse_double_field(item, "sweep config: key '" + key + "'"));
    }
    return out;
  };
  const auto parse_count = [](const std::string& value, const std::string& key) {
    int v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size() || v < 1) {
      throw std::runtime_error("sweep config: key '" + key +
                               "' needs a positive integer, got '" + value +
                               "'");
    }
    return v;
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("sweep config: line " + std::to_string(lineno) +
                               " is not key=value: '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "q1_grid") {
      spec.q1_grid = parse_list(value, key);
    } else if (key == "sigma2_grid") {
      spec.sigma2_grid = parse_list(value, key);
    } else if (key == "q2") {
      spec.q2 = parse_double_field(value, "sweep config: key 'q2'");
    } else if (key == "T") {
      spec.T = parse_double_field(value, "sweep config: key 'T'");
    } else if (key == "n_trajectories") {
      spec.n_trajectories = parse_count(value, key);
    } else if (key == "n_targets_per_trajectory") {
      spec.n_targets_per_trajectory = parse_count(value, key);
    } else if (key == "K") {
      spec.K = parse_count(value, key);
    } else if (key == "master_seed") {
      std::uint64_t v = 0;
      auto [p, ec] =
          std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || p != value.data() + value.size()) {
        throw std::runtime_error(
            "sweep config: key 'master_seed' needs an unsigned integer, "
            "got '" +
            value + "'");
      }
      spec.master_seed = v;
    } else {
      throw std::runtime_error("sweep config: unknown key '" + key + "'");
    }
  }
  validate_spec(spec);
  return spec;
}

}  // namespace dif
