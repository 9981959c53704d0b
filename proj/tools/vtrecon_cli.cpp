// vtrecon command line: run a reconstruction session, compare exploration
// strategies over seeds, or export a logged iteration as PLY.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vtrecon/errors.hpp"
#include "vtrecon/mesh_io.hpp"
#include "vtrecon/session.hpp"
#include "vtrecon/session_log.hpp"

namespace fs = std::filesystem;
using namespace vtrecon;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2, kIoError = 3 };

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  return out;
}

std::string numbered(const char* prefix, int iteration, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.%s", prefix, iteration, ext);
  return buf;
}

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& snapshots,
            const std::optional<fs::path>& metrics_path, const std::optional<fs::path>& log_path) {
  const SessionConfig cfg = load_config(config_path);

  if (snapshots) {
    std::error_code ec;
    fs::create_directories(*snapshots, ec);
    if (ec) {
      throw IoError("cannot create snapshot directory " + snapshots->string());
    }
  }
  std::optional<fs::path> log_file = log_path;
  if (!log_file && snapshots) {
    log_file = *snapshots / "session.log";
  }
  std::ofstream log_stream;
  std::optional<SessionLogWriter> log;

  const auto observer = [&](const SessionState& state, const IterationRecord& rec) {
    if (log_file && !log) {
      log_stream = open_output(*log_file);
      log.emplace(log_stream, state.estimate);
    }
    if (log) {
      log->write_iteration(state, rec);
    }
    if (snapshots) {
      save_ply(*snapshots / numbered("iter", rec.iteration, "ply"), state.estimate, state.field.values);
      if (rec.iteration > 0 && state.last_selection) {
        std::ofstream scores = open_output(*snapshots / numbered("scores", rec.iteration, "csv"));
        write_scores_csv(scores, state.last_selection->scores);
      }
    }
    std::fprintf(stderr, "iteration %3d  chamfer %8.3f mm  failures %3d  %s\n", rec.iteration, rec.chamfer * 1000.0,
                 rec.cumulative_failures,
                 rec.outcome ? std::string(to_string(*rec.outcome)).c_str() : "init");
  };

  const SessionResult result = run_session(cfg, observer);
  if (result.terminated_early) {
    std::fprintf(stderr, "no admissible candidate left; stopped after %d iterations\n",
                 result.records.back().iteration);
  }

  if (metrics_path) {
    std::ofstream out = open_output(*metrics_path);
    write_metrics_csv(out, result.records);
  } else {
    write_metrics_csv(std::cout, result.records);
  }
  return kOk;
}

int cmd_compare(const fs::path& config_path, const std::vector<std::uint64_t>& seeds, const fs::path& out_path) {
  const SessionConfig cfg = load_config(config_path);
  if (seeds.empty()) {
    throw ConfigError("--seeds needs at least one seed");
  }
  const ComparisonSummary summary = compare_strategies(cfg, seeds);
  std::ofstream out = open_output(out_path);
  write_summary_csv(out, summary);
  write_summary_table(std::cout, summary);
  return kOk;
}

int cmd_export(const fs::path& session_path, int iteration, const fs::path& ply_path) {
  const SessionSnapshot snap = load_snapshot(session_path, iteration);
  save_ply(ply_path, snap.estimate, snap.uncertainty);
  std::fprintf(stderr, "iteration %d: %zu vertices, %zu attractors, chamfer %.3f mm\n", snap.iteration,
               snap.estimate.vertex_count(), snap.attractors.size(), snap.chamfer * 1000.0);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative visuo-tactile shape reconstruction"};
  app.require_subcommand(1);

  fs::path config_path;
  std::optional<fs::path> snapshots;
  std::optional<fs::path> metrics_path;
  std::optional<fs::path> log_path;
  auto* run = app.add_subcommand("run", "Run one reconstruction session");
  run->add_option("--config", config_path, "Session config file")->required();
  run->add_option("--snapshots", snapshots, "Directory for per-iteration PLY snapshots, score tables and the log");
  run->add_option("--metrics", metrics_path, "Metrics CSV path (default: stdout)");
  run->add_option("--log", log_path, "Session log path (default: <snapshots>/session.log)");

  std::vector<std::uint64_t> seeds;
  fs::path out_path;
  auto* compare = app.add_subcommand("compare", "Paired ours/minU runs over several seeds");
  compare->add_option("--config", config_path, "Session config file")->required();
  compare->add_option("--seeds", seeds, "Comma-separated seeds")->required()->delimiter(',');
  compare->add_option("--out", out_path, "Summary CSV path")->required();

  fs::path session_path;
  int iteration = 0;
  fs::path ply_path;
  auto* exp = app.add_subcommand("export", "Write one logged iteration as a colored PLY");
  exp->add_option("--session", session_path, "Session log")->required();
  exp->add_option("--iteration", iteration, "Iteration number")->required()->check(CLI::NonNegativeNumber);
  exp->add_option("--ply", ply_path, "Output PLY path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      return cmd_run(config_path, snapshots, metrics_path, log_path);
    }
    if (*compare) {
      return cmd_compare(config_path, seeds, out_path);
    }
    return cmd_export(session_path, iteration, ply_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIoError;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalError;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "out of memory\n");
    return kNumericalError;
  }
}
