#include "common.hpp"

#include <cstdlib>
#include <sstream>
#include <fstream>

#include "gsc/errors.hpp"
#include "gsc/version.hpp"

namespace gsctool {

std::filesystem::path resolve_out_dir(const std::string& flag_value) {
  std::filesystem::path dir;
  if (!flag_value.empty()) {
    dir = flag_value;
  } else if (const char* env = std::getenv("GSC_OUT_DIR")) {
    dir = env;
  } else {
    dir = "gsc_out";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

gsc::ScenarioMeasure parse_scenario(const std::string& spec, double t0, double T) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "constant") {
    const auto v = gsc::parse_number_list(rest);
    if (v.size() != 1) throw gsc::ConfigError("scenario constant:<gamma>");
    return gsc::ScenarioMeasure::constant(v[0]);
  }
  if (kind == "piecewise") {
    // each item is <gamma> or <gamma>@<break>; items without breaks split
    // [t0, T] into equal subintervals
    std::vector<double> levels, breaks;
    bool explicit_breaks = rest.find('@') != std::string::npos;
    std::string item;
    std::istringstream in(rest);
    while (std::getline(in, item, ',')) {
      const auto at = item.find('@');
      levels.push_back(std::stod(item.substr(0, at)));
      if (at != std::string::npos) breaks.push_back(std::stod(item.substr(at + 1)));
    }
    if (levels.empty()) throw gsc::ConfigError("scenario piecewise: empty level list");
    if (!explicit_breaks) {
      const auto k = levels.size();
      for (std::size_t j = 1; j < k; ++j)
        breaks.push_back(t0 + (T - t0) * static_cast<double>(j) / static_cast<double>(k));
    }
    if (breaks.size() + 1 != levels.size())
      throw gsc::ConfigError("scenario piecewise: need one breakpoint between levels");
    return gsc::ScenarioMeasure::piecewise(std::move(levels), std::move(breaks));
  }
  throw gsc::ConfigError("unknown scenario spec: " + spec +
                         " (expected constant:<g> or piecewise:<g1,g2,...>)");
}

json meta_block(const gsc::KeyValues& effective) {
  json meta;
  meta["tool_version"] = gsc::kVersion;
  meta["config_hash"] = gsc::hex64(gsc::fnv1a64(effective.canonical()));
  return meta;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gsc::ConfigError("cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

ExampleSelection load_example(int index, double T_flag, double v_flag) {
  ExampleSelection sel;
  sel.index = index;
  sel.v = v_flag > 0.0 ? v_flag : 1.25;
  const double defaults[] = {0.0, 1.0, 0.25, 2.0};
  if (index < 1 || index > 3) throw gsc::ConfigError("example must be 1, 2 or 3");
  sel.T = T_flag > 0.0 ? T_flag : defaults[index];
  sel.ex = gsc::example_by_name(std::to_string(index), sel.T, sel.v);
  return sel;
}

}  // namespace gsctool
