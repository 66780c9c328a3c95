#pragma once

#include <filesystem>
#include <string>

#include "gsc/examples.hpp"
#include "gsc/scenario.hpp"
#include "gsc/util.hpp"
#include "json.hpp"

namespace gsctool {

using nlohmann::json;

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

std::filesystem::path resolve_out_dir(const std::string& flag_value);

/// `constant:<g>` | `piecewise:<g1,g2,...>` (equal subintervals of [t0, T])
/// | `piecewise:<g1@b1,g2@b2,...,gk>` with explicit breakpoints.
gsc::ScenarioMeasure parse_scenario(const std::string& spec, double t0, double T);

/// meta block with tool version and the hash of the effective settings
json meta_block(const gsc::KeyValues& effective);

void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const json& j);

struct ExampleSelection {
  gsc::ExampleProblem ex;
  int index = 0;
  double T = 0.0;
  double v = 0.0;
};

/// Loads a built-in example with per-example default horizons
/// (1: T=1, 2: T=0.25, 3: T=2) unless the caller pins T.
ExampleSelection load_example(int index, double T_flag, double v_flag);

int run_verify(const ExampleSelection& sel, const std::string& scenario_flag, double tstar_flag,
               std::uint64_t seed, int n_threads, const std::filesystem::path& out_dir,
               const gsc::KeyValues& effective);

}  // namespace gsctool
