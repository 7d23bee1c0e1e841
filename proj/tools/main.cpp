#include "CLI11.hpp"

#include "shuttlesim/sweep.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("SHUTTLESIM_PRESET_DIR")) return env;
  return SHUTTLESIM_PRESET_DIR;
}

shuttlesim::Config load_config(const std::string& config_path, const std::string& preset) {
  using shuttlesim::Config;
  if (!preset.empty() && !config_path.empty()) {
    throw std::runtime_error("--config and --preset are mutually exclusive");
  }
  if (!preset.empty()) {
    const auto path = preset_dir() / (preset + ".toml");
    if (!std::filesystem::exists(path)) {
      throw std::runtime_error("unknown preset '" + preset + "' (looked in " +
                               preset_dir().string() + ")");
    }
    return Config::parse_file(path.string());
  }
  if (!config_path.empty()) return Config::parse_file(config_path);
  return {};
}

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "TOML-style config file");
  cmd->add_option("--preset", flags.preset, "named in-repo preset");
  cmd->add_option("--out", flags.out, "output CSV path");
  cmd->add_option("--seed", flags.seed, "master seed")->each([&](const std::string&) {
    flags.seed_set = true;
  });
  cmd->add_option("--jobs", flags.jobs, "worker count");
}

int run_kind(const std::string& kind, const CommonFlags& flags) {
  shuttlesim::Config cfg = load_config(flags.config_path, flags.preset);
  cfg.set("experiment.kind", shuttlesim::ConfigValue{kind});
  if (flags.seed_set) {
    cfg.set("experiment.seed", shuttlesim::ConfigValue{static_cast<double>(flags.seed)});
  }
  if (!flags.out.empty()) cfg.set("experiment.out", shuttlesim::ConfigValue{flags.out});
  if (flags.jobs > 0) {
    cfg.set("experiment.jobs", shuttlesim::ConfigValue{static_cast<double>(flags.jobs)});
  }

  const auto ec = shuttlesim::ExperimentConfig::from_config(cfg);
  const auto rs = shuttlesim::run_experiment(ec);
  std::cout << ec.out_path << ": " << rs.n_records << " records, " << rs.n_failed
            << " failed (" << rs.wall_seconds << " s)\n";
  return rs.n_failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum dot shuttling simulations"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"gen-landscape", "sample a disorder landscape to CSV"},
      {"transfer-sweep", "paused interchannel transfer Monte Carlo"},
      {"moving-sweep", "moving interchannel transfer Monte Carlo"},
      {"leakage-2d", "long-range 2D shuttle leakage"},
      {"electro-window", "gate electrostatics operating window"},
  };
  std::vector<std::unique_ptr<CommonFlags>> flag_sets;
  for (const auto& [name, help] : kinds) {
    auto* cmd = app.add_subcommand(name, help);
    flag_sets.push_back(std::make_unique<CommonFlags>());
    add_common(cmd, *flag_sets.back());
  }

  auto* sum_cmd = app.add_subcommand("summarize", "aggregate a sweep CSV per grid point");
  std::string sum_input;
  std::string sum_out;
  sum_cmd->add_option("results", sum_input, "sweep CSV to aggregate")->required();
  sum_cmd->add_option("--out", sum_out, "write the aggregate table here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sum_cmd->parsed()) {
      const auto result = shuttlesim::summarize(sum_input);
      for (const auto& w : result.warnings) std::cerr << sum_input << ": " << w << "\n";
      const std::string table = shuttlesim::summary_table_csv(result);
      if (sum_out.empty()) {
        std::cout << table;
      } else {
        std::ofstream out(sum_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + sum_out);
        out << table;
      }
      return result.warnings.empty() ? 0 : 1;
    }
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (app.get_subcommand(kinds[i].first)->parsed()) {
        return run_kind(kinds[i].first, *flag_sets[i]);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
