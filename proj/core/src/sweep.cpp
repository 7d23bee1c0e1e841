#include "shuttlesim/sweep.hpp"

#include "shuttlesim/rng.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace shuttlesim {

namespace {

constexpr const char* kVersionStamp = "shuttlesim 0.1.0";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ';';
  }
  return s;
}

void parallel_for(long n, int jobs, const std::function<void(long)>& body) {
  const int workers = static_cast<int>(std::min<long>(std::max(jobs, 1), n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void write_lines(const std::string& path, const std::string& header,
                 const std::vector<std::string>& rows) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "gen-landscape") return ExperimentKind::GenLandscape;
  if (name == "transfer-sweep") return ExperimentKind::TransferSweep;
  if (name == "moving-sweep") return ExperimentKind::MovingSweep;
  if (name == "leakage-2d") return ExperimentKind::Leakage2D;
  if (name == "electrostatics-window" || name == "electro-window") {
    return ExperimentKind::ElectroWindow;
  }
  throw std::runtime_error("unknown experiment kind: " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::GenLandscape: return "gen-landscape";
    case ExperimentKind::TransferSweep: return "transfer-sweep";
    case ExperimentKind::MovingSweep: return "moving-sweep";
    case ExperimentKind::Leakage2D: return "leakage-2d";
    case ExperimentKind::ElectroWindow: return "electrostatics-window";
  }
  return "?";
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
  static const std::set<std::string> allowed = {
      "experiment.kind", "experiment.seed", "experiment.realizations",
      "experiment.jobs", "experiment.out",
      "transfer.eps0", "transfer.t0", "transfer.tau_tot", "transfer.settle",
      "transfer.sigma_delta",
      "moving.velocity", "moving.correlated", "moving.sigma_eps", "moving.l_dot",
      "moving.pitch", "moving.channel_separation",
      "shuttle.t0", "shuttle.velocity", "shuttle.distance", "shuttle.pitch",
      "shuttle.sigma_t",
      "window.pitches", "window.v_amps", "window.e_orb_min", "window.t_p_max",
      "landscape.sigma_delta", "landscape.sigma_eps", "landscape.t0",
      "landscape.sigma_t", "landscape.l_dot", "landscape.pitch",
      "landscape.x_min", "landscape.x_max", "landscape.channel_y",
      "landscape.gate_correlated",
  };
  for (const auto& [key, value] : cfg.values()) {
    (void)value;
    if (!allowed.count(key)) throw std::runtime_error("unknown config key '" + key + "'");
  }

  ExperimentConfig ec;
  ec.kind = experiment_kind_from_string(cfg.get_string("experiment.kind", "transfer-sweep"));
  ec.master_seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", 1));
  ec.n_realizations = static_cast<int>(cfg.get_int("experiment.realizations", 1));
  ec.jobs = static_cast<int>(cfg.get_int("experiment.jobs", 1));
  ec.out_path = cfg.get_string("experiment.out", "results.csv");

  ec.eps0 = cfg.get_double_array("transfer.eps0", ec.eps0);
  ec.t0 = cfg.get_double_array("transfer.t0", ec.t0);
  ec.tau_tot = cfg.get_double_array("transfer.tau_tot", ec.tau_tot);
  ec.settle = cfg.get_double("transfer.settle", ec.settle);
  ec.sigma_delta = cfg.get_double("transfer.sigma_delta", ec.sigma_delta);

  ec.velocity = cfg.get_double_array("moving.velocity", ec.velocity);
  ec.correlated = cfg.get_bool("moving.correlated", ec.correlated);
  ec.sigma_eps = cfg.get_double("moving.sigma_eps", ec.sigma_eps);
  ec.l_dot = cfg.get_double("moving.l_dot", ec.l_dot);
  ec.pitch = cfg.get_double("moving.pitch", ec.pitch);
  ec.channel_separation = cfg.get_double("moving.channel_separation", ec.channel_separation);

  ec.shuttle_t0 = cfg.get_double_array("shuttle.t0", ec.shuttle_t0);
  ec.shuttle_velocity = cfg.get_double("shuttle.velocity", ec.shuttle_velocity);
  ec.distance = cfg.get_double("shuttle.distance", ec.distance);
  ec.shuttle_pitch = cfg.get_double("shuttle.pitch", ec.shuttle_pitch);
  ec.shuttle_sigma_t = cfg.get_double("shuttle.sigma_t", ec.shuttle_sigma_t);

  ec.win_pitches = cfg.get_double_array("window.pitches", ec.win_pitches);
  ec.win_v_amps = cfg.get_double_array("window.v_amps", ec.win_v_amps);
  ec.thresholds.e_orb_min = cfg.get_double("window.e_orb_min", ec.thresholds.e_orb_min);
  ec.thresholds.t_p_max = cfg.get_double("window.t_p_max", ec.thresholds.t_p_max);

  ec.landscape.sigma_delta = cfg.get_double("landscape.sigma_delta", ec.landscape.sigma_delta);
  ec.landscape.sigma_eps = cfg.get_double("landscape.sigma_eps", ec.landscape.sigma_eps);
  ec.landscape.t0 = cfg.get_double("landscape.t0", ec.landscape.t0);
  ec.landscape.sigma_t = cfg.get_double("landscape.sigma_t", ec.landscape.sigma_t);
  ec.landscape.l_dot = cfg.get_double("landscape.l_dot", ec.landscape.l_dot);
  ec.landscape.pitch = cfg.get_double("landscape.pitch", ec.landscape.pitch);
  ec.landscape.x_min = cfg.get_double("landscape.x_min", ec.landscape.x_min);
  ec.landscape.x_max = cfg.get_double("landscape.x_max", ec.landscape.x_max);
  ec.landscape.channel_y = cfg.get_double_array("landscape.channel_y", ec.landscape.channel_y);
  ec.landscape.gate_correlated =
      cfg.get_bool("landscape.gate_correlated", ec.landscape.gate_correlated);

  ec.validate();
  return ec;
}

void ExperimentConfig::validate() const {
  if (n_realizations < 0) throw std::runtime_error("realizations must be >= 0");
  if (jobs < 1) throw std::runtime_error("jobs must be >= 1");
  if (out_path.empty()) throw std::runtime_error("out path must not be empty");
  const auto all_positive = [](const std::vector<double>& v, const char* what) {
    if (v.empty()) throw std::runtime_error(std::string(what) + " must not be empty");
    for (double x : v) {
      if (!(x > 0.0)) throw std::runtime_error(std::string(what) + " must be positive");
    }
  };
  switch (kind) {
    case ExperimentKind::TransferSweep:
      all_positive(eps0, "transfer.eps0");
      all_positive(t0, "transfer.t0");
      all_positive(tau_tot, "transfer.tau_tot");
      if (sigma_delta <= 0.0) throw std::runtime_error("sigma_delta must be positive");
      break;
    case ExperimentKind::MovingSweep:
      all_positive(eps0, "transfer.eps0");
      all_positive(t0, "transfer.t0");
      all_positive(tau_tot, "transfer.tau_tot");
      all_positive(velocity, "moving.velocity");
      if (sigma_eps <= 0.0 || l_dot <= 0.0 || pitch <= 0.0 || channel_separation <= 0.0) {
        throw std::runtime_error("moving sweep parameters must be positive");
      }
      break;
    case ExperimentKind::Leakage2D:
      all_positive(shuttle_t0, "shuttle.t0");
      if (shuttle_velocity <= 0.0 || distance <= 0.0 || shuttle_pitch <= 0.0) {
        throw std::runtime_error("shuttle parameters must be positive");
      }
      break;
    case ExperimentKind::ElectroWindow:
      all_positive(win_pitches, "window.pitches");
      all_positive(win_v_amps, "window.v_amps");
      break;
    case ExperimentKind::GenLandscape:
      landscape.validate();
      break;
  }
}

namespace {

struct RecordSink {
  std::vector<std::string> rows;
  std::atomic<long> failed{0};
};

Config experiment_as_config(const ExperimentConfig& ec) {
  // canonical echo of the effective settings, used for the config hash
  Config c;
  c.set("experiment.kind", ConfigValue{std::string(to_string(ec.kind))});
  c.set("experiment.seed", ConfigValue{static_cast<double>(ec.master_seed)});
  c.set("experiment.realizations", ConfigValue{static_cast<double>(ec.n_realizations)});
  c.set("experiment.out", ConfigValue{ec.out_path});
  c.set("transfer.eps0", ConfigValue{ec.eps0});
  c.set("transfer.t0", ConfigValue{ec.t0});
  c.set("transfer.tau_tot", ConfigValue{ec.tau_tot});
  c.set("transfer.settle", ConfigValue{ec.settle});
  c.set("transfer.sigma_delta", ConfigValue{ec.sigma_delta});
  c.set("moving.velocity", ConfigValue{ec.velocity});
  c.set("moving.correlated", ConfigValue{ec.correlated});
  c.set("moving.sigma_eps", ConfigValue{ec.sigma_eps});
  c.set("moving.l_dot", ConfigValue{ec.l_dot});
  c.set("moving.pitch", ConfigValue{ec.pitch});
  c.set("moving.channel_separation", ConfigValue{ec.channel_separation});
  c.set("shuttle.t0", ConfigValue{ec.shuttle_t0});
  c.set("shuttle.velocity", ConfigValue{ec.shuttle_velocity});
  c.set("shuttle.distance", ConfigValue{ec.distance});
  c.set("shuttle.pitch", ConfigValue{ec.shuttle_pitch});
  c.set("shuttle.sigma_t", ConfigValue{ec.shuttle_sigma_t});
  c.set("window.pitches", ConfigValue{ec.win_pitches});
  c.set("window.v_amps", ConfigValue{ec.win_v_amps});
  c.set("window.e_orb_min", ConfigValue{ec.thresholds.e_orb_min});
  c.set("window.t_p_max", ConfigValue{ec.thresholds.t_p_max});
  return c;
}

std::string run_transfer_like(const ExperimentConfig& ec, RecordSink& sink) {
  const bool moving = ec.kind == ExperimentKind::MovingSweep;
  struct GridPoint {
    double v, eps0, t0, tau;
    std::uint64_t gp_seed;
  };
  std::vector<GridPoint> grid;
  const std::vector<double> vs = moving ? ec.velocity : std::vector<double>{0.0};
  std::uint64_t gp_index = 0;
  for (double v : vs) {
    for (double e0 : ec.eps0) {
      for (double t0 : ec.t0) {
        for (double tau : ec.tau_tot) {
          grid.push_back({v, e0, t0, tau, derive_seed(ec.master_seed, "grid", gp_index++)});
        }
      }
    }
  }
  const long n_records = static_cast<long>(grid.size()) * ec.n_realizations;
  sink.rows.assign(static_cast<std::size_t>(n_records), {});

  parallel_for(n_records, ec.jobs, [&](long rec) {
    const auto& gp = grid[static_cast<std::size_t>(rec / ec.n_realizations)];
    const int draw = static_cast<int>(rec % ec.n_realizations);
    const std::uint64_t draw_seed = derive_seed(gp.gp_seed, "draw", static_cast<std::uint64_t>(draw));

    TransferSchedule sched;
    sched.epsilon0 = gp.eps0;
    sched.t0 = gp.t0;
    sched.tau_tot = gp.tau;
    sched.settle = ec.settle;

    TransferScenario scenario;
    if (moving) {
      MovingScenario ms;
      ms.v_x = gp.v;
      ms.pitch = ec.pitch;
      ms.correlated = ec.correlated;
      ms.sigma_delta = ec.sigma_delta;
      ms.sigma_eps = ec.sigma_eps;
      ms.l_dot = ec.l_dot;
      ms.channel_separation = ec.channel_separation;
      scenario = ms;
    } else {
      scenario = PausedScenario{ec.sigma_delta};
    }

    double fidelity = std::nan("");
    bool success = false;
    std::string error;
    try {
      const TransferOutcome out = transfer_draw(sched, scenario, gp.gp_seed, draw);
      fidelity = out.fidelity;
      success = out.success;
    } catch (const std::exception& e) {
      error = e.what();
      sink.failed.fetch_add(1);
    }

    std::ostringstream row;
    if (moving) row << fmt(gp.v) << "," << (ec.correlated ? 1 : 0) << ",";
    row << fmt(gp.eps0) << "," << fmt(gp.t0) << "," << fmt(gp.tau) << "," << draw << ","
        << draw_seed << "," << fmt(fidelity) << "," << (success ? 1 : 0) << ","
        << csv_escape(error);
    sink.rows[static_cast<std::size_t>(rec)] = row.str();
  });
  return moving ? "velocity,correlated,eps0,t0,tau_tot,draw,seed,fidelity,success,error"
                : "eps0,t0,tau_tot,draw,seed,fidelity,success,error";
}

std::string run_leakage(const ExperimentConfig& ec, RecordSink& sink) {
  const long n_records = static_cast<long>(ec.shuttle_t0.size()) * ec.n_realizations;
  sink.rows.assign(static_cast<std::size_t>(n_records), {});

  parallel_for(n_records, ec.jobs, [&](long rec) {
    const std::size_t gi = static_cast<std::size_t>(rec / ec.n_realizations);
    const int draw = static_cast<int>(rec % ec.n_realizations);
    const double t0 = ec.shuttle_t0[gi];
    const std::uint64_t gp_seed =
        derive_seed(ec.master_seed, "grid", static_cast<std::uint64_t>(gi));
    const std::uint64_t draw_seed = derive_seed(gp_seed, "draw", static_cast<std::uint64_t>(draw));

    ShuttleConfig sc;
    sc.t0 = t0;
    sc.sigma_t = ec.shuttle_sigma_t;
    sc.velocity = ec.shuttle_velocity;
    sc.distance = ec.distance;
    sc.pitch = ec.shuttle_pitch;
    sc.l_dot = ec.l_dot;
    sc.sigma_delta = ec.sigma_delta;
    sc.sigma_eps = ec.sigma_eps;
    sc.seed = draw_seed;

    double fidelity = std::nan("");
    double leakage = std::nan("");
    bool success = false;
    std::string error;
    try {
      const ShuttleRun run = run_shuttle(sc);
      fidelity = run.fidelity;
      leakage = run.leakage;
      success = true;
    } catch (const std::exception& e) {
      error = e.what();
      sink.failed.fetch_add(1);
    }

    std::ostringstream row;
    row << fmt(t0) << "," << fmt(ec.shuttle_velocity) << "," << fmt(ec.distance) << ","
        << draw << "," << draw_seed << "," << fmt(fidelity) << "," << fmt(leakage) << ","
        << (success ? 1 : 0) << "," << csv_escape(error);
    sink.rows[static_cast<std::size_t>(rec)] = row.str();
  });
  return "t0,velocity,distance,draw,seed,fidelity,leakage,success,error";
}

std::string run_window(const ExperimentConfig& ec, RecordSink& sink) {
  struct Cell {
    double pitch, v_amp;
  };
  std::vector<Cell> cells;
  for (double p : ec.win_pitches) {
    for (double v : ec.win_v_amps) cells.push_back({p, v});
  }
  sink.rows.assign(cells.size(), {});

  parallel_for(static_cast<long>(cells.size()), ec.jobs, [&](long rec) {
    const Cell& cell = cells[static_cast<std::size_t>(rec)];
    WindowCell wc;
    bool success = false;
    std::string error;
    try {
      wc = window_cell(cell.pitch, cell.v_amp, ec.thresholds);
      success = true;
    } catch (const std::exception& e) {
      error = e.what();
      sink.failed.fetch_add(1);
    }
    std::ostringstream row;
    row << fmt(cell.pitch) << "," << fmt(cell.v_amp) << "," << fmt(wc.e_orb) << ","
        << fmt(wc.t_p) << "," << (wc.in_window ? 1 : 0) << "," << (success ? 1 : 0) << ","
        << csv_escape(error);
    sink.rows[static_cast<std::size_t>(rec)] = row.str();
  });
  return "pitch,v_amp,e_orb_meV,t_p_meV,in_window,success,error";
}

std::string run_landscape(const ExperimentConfig& ec, RecordSink& sink) {
  std::vector<std::vector<std::string>> per_draw(static_cast<std::size_t>(ec.n_realizations));
  parallel_for(ec.n_realizations, ec.jobs, [&](long draw) {
    LandscapeConfig lc = ec.landscape;
    lc.master_seed = derive_seed(ec.master_seed, "grid", static_cast<std::uint64_t>(draw));
    std::vector<std::string> rows;
    try {
      const LandscapeBundle bundle = sample_landscape_bundle(lc);
      for (std::size_t ch = 0; ch < bundle.channels.size(); ++ch) {
        const ChannelTrack& track = bundle.channels[ch];
        const auto n = track.eps_alloy.values.size();
        for (Eigen::Index i = 0; i < n; ++i) {
          const double x = track.eps_alloy.x0 + track.eps_alloy.dx * static_cast<double>(i);
          std::ostringstream row;
          row << draw << "," << ch << "," << fmt(track.y) << "," << fmt(x) << ","
              << fmt(track.eps_alloy.values[i]) << "," << fmt(track.eps_gate.values[i]) << ","
              << fmt(track.valley.re.values[i]) << "," << fmt(track.valley.im.values[i]) << ","
              << fmt(track.tunnel.values[i]);
          rows.push_back(row.str());
        }
      }
    } catch (const std::exception& e) {
      rows.push_back(std::to_string(draw) + ",,,,,,,," + csv_escape(e.what()));
      sink.failed.fetch_add(1);
    }
    per_draw[static_cast<std::size_t>(draw)] = std::move(rows);
  });
  for (auto& rows : per_draw) {
    for (auto& r : rows) sink.rows.push_back(std::move(r));
  }
  return "draw,channel,y,x,eps_alloy,eps_gate,delta_re,delta_im,t_p";
}

} // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t_begin = std::chrono::steady_clock::now();

  RecordSink sink;
  std::string header;
  switch (cfg.kind) {
    case ExperimentKind::TransferSweep:
    case ExperimentKind::MovingSweep:
      header = run_transfer_like(cfg, sink);
      break;
    case ExperimentKind::Leakage2D:
      header = run_leakage(cfg, sink);
      break;
    case ExperimentKind::ElectroWindow:
      header = run_window(cfg, sink);
      break;
    case ExperimentKind::GenLandscape:
      header = run_landscape(cfg, sink);
      break;
  }
  write_lines(cfg.out_path, header, sink.rows);

  RunSummary rs;
  rs.csv_path = cfg.out_path;
  rs.summary_path = cfg.out_path + ".summary.json";
  rs.n_records = static_cast<long>(sink.rows.size());
  rs.n_failed = sink.failed.load();
  rs.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();

  nlohmann::json summary;
  summary["version"] = kVersionStamp;
  summary["kind"] = to_string(cfg.kind);
  {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(experiment_as_config(cfg).hash()));
    summary["config_hash"] = hex;
  }
  summary["master_seed"] = cfg.master_seed;
  summary["records"] = rs.n_records;
  summary["failed"] = rs.n_failed;
  summary["csv"] = rs.csv_path;
  // wall time lives only here so the CSV stays bit-identical across reruns
  summary["wall_seconds"] = rs.wall_seconds;
  std::ofstream out(rs.summary_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + rs.summary_path);
  out << summary.dump(2) << "\n";
  return rs;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace

SummarizeResult summarize(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open result file: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty result file: " + csv_path);

  const std::vector<std::string> header = split_csv(line);
  const auto find_col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int draw_col = find_col("draw");
  if (draw_col < 0) throw std::runtime_error("result file has no 'draw' column: " + csv_path);
  const int success_col = find_col("success");
  if (success_col < 0) throw std::runtime_error("result file has no 'success' column: " + csv_path);
  const int leak_col = find_col("leakage");
  const int fid_col = find_col("fidelity");
  const int value_col = leak_col >= 0 ? leak_col : fid_col;
  if (value_col < 0) throw std::runtime_error("result file has no value column: " + csv_path);

  SummarizeResult result;
  result.group_columns.assign(header.begin(), header.begin() + draw_col);
  result.value_column = header[static_cast<std::size_t>(value_col)];

  struct Acc {
    int n = 0, n_success = 0, n_valid = 0;
    double sum = 0.0, sum_sq = 0.0;
  };
  std::vector<std::pair<std::vector<std::string>, Acc>> groups;
  std::map<std::string, std::size_t> index;

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size()) {
      result.warnings.push_back("line " + std::to_string(lineno) + ": expected " +
                                std::to_string(header.size()) + " fields, got " +
                                std::to_string(cells.size()));
      continue;
    }
    std::vector<std::string> key(cells.begin(), cells.begin() + draw_col);
    std::string flat;
    for (const auto& k : key) flat += k + "\x1f";
    const auto [it, inserted] = index.try_emplace(flat, groups.size());
    if (inserted) groups.emplace_back(std::move(key), Acc{});
    Acc& acc = groups[it->second].second;

    ++acc.n;
    char* end = nullptr;
    const std::string& success_str = cells[static_cast<std::size_t>(success_col)];
    const long success = std::strtol(success_str.c_str(), &end, 10);
    if (end == success_str.c_str() || *end != '\0' || (success != 0 && success != 1)) {
      result.warnings.push_back("line " + std::to_string(lineno) + ": bad success flag '" +
                                success_str + "'");
      --acc.n;
      continue;
    }
    acc.n_success += static_cast<int>(success);
    const std::string& value_str = cells[static_cast<std::size_t>(value_col)];
    const double value = std::strtod(value_str.c_str(), &end);
    if (end != value_str.c_str() && *end == '\0' && std::isfinite(value)) {
      ++acc.n_valid;
      acc.sum += value;
      acc.sum_sq += value * value;
    }
  }

  for (auto& [key, acc] : groups) {
    AggregateRow row;
    row.group = key;
    row.n = acc.n;
    row.n_success = acc.n_success;
    if (acc.n > 0) {
      row.p_suc = static_cast<double>(acc.n_success) / acc.n;
      row.stderr_binomial = std::sqrt(row.p_suc * (1.0 - row.p_suc) / acc.n);
    }
    if (acc.n_valid > 0) {
      row.mean_value = acc.sum / acc.n_valid;
      if (acc.n_valid > 1) {
        const double var =
            std::max(0.0, (acc.sum_sq - acc.sum * acc.sum / acc.n_valid) / (acc.n_valid - 1));
        row.stderr_value = std::sqrt(var / acc.n_valid);
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string summary_table_csv(const SummarizeResult& result) {
  std::ostringstream os;
  for (const auto& c : result.group_columns) os << c << ",";
  os << "n,n_success,p_suc,stderr_binomial,mean_" << result.value_column << ",stderr_"
     << result.value_column << "\n";
  for (const auto& row : result.rows) {
    for (const auto& g : row.group) os << g << ",";
    os << row.n << "," << row.n_success << "," << fmt(row.p_suc) << ","
       << fmt(row.stderr_binomial) << "," << fmt(row.mean_value) << ","
       << fmt(row.stderr_value) << "\n";
  }
  return os.str();
}

} // namespace shuttlesim
