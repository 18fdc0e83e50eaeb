// nemx command-line front end. Talks to the library only through its C API.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nemx/nemx.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitProperty = 2;
constexpr int kExitUsage = 64;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 0;
  double resolution = 0.0;
  std::vector<double> g;
  long t = -1;
};

// Owns a string handed out by the library.
class LibString {
 public:
  LibString() = default;
  LibString(const LibString&) = delete;
  LibString& operator=(const LibString&) = delete;
  ~LibString() { nemx_string_free(ptr_); }

  char** slot() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

std::string out_dir(const Options& opt) {
  if (const char* env = std::getenv("NEMX_OUT_DIR"); env && *env) return env;
  return opt.out;
}

bool emit(const Options& opt, const std::string& name, const std::string& body,
          bool to_stdout = true) {
  if (to_stdout) std::fwrite(body.data(), 1, body.size(), stdout);
  const std::string dir = out_dir(opt);
  if (dir.empty()) return true;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream file(std::filesystem::path(dir) / name, std::ios::binary);
  if (!file) {
    std::cerr << "nemx: cannot write " << (std::filesystem::path(dir) / name).string() << "\n";
    return false;
  }
  file << body;
  return true;
}

int failure(nemx_status status) {
  std::cerr << "nemx: error " << static_cast<int>(status) << ": " << nemx_last_error() << "\n";
  return kExitValidation;
}

int run(const std::string& command, const Options& opt) {
  nemx_scenario* raw = nullptr;
  nemx_status st = nemx_scenario_load(opt.config.c_str(), opt.seed.has_value(),
                                      opt.seed.value_or(0), &raw);
  if (st != NEMX_OK) return failure(st);
  std::unique_ptr<nemx_scenario, decltype(&nemx_scenario_free)> scenario(raw,
                                                                         nemx_scenario_free);
  LibString text;
  int pass = 1;
  bool written = true;

  if (command == "thresholds") {
    st = nemx_thresholds_json(scenario.get(), opt.t, text.slot());
    if (st == NEMX_OK) written = emit(opt, "thresholds.json", text.str());
  } else if (command == "decide") {
    st = nemx_decide_json(scenario.get(), opt.g.data(), opt.g.size(), opt.t, text.slot());
    if (st == NEMX_OK) written = emit(opt, "decide.json", text.str());
  } else if (command == "rank") {
    st = nemx_rank_json(scenario.get(), opt.t, text.slot());
    if (st == NEMX_OK) written = emit(opt, "rank.json", text.str());
  } else if (command == "zones") {
    st = nemx_zones_json(scenario.get(), opt.t, text.slot(), &pass);
    if (st == NEMX_OK) written = emit(opt, "zones.json", text.str());
  } else if (command == "statics") {
    st = nemx_statics_csv(scenario.get(), opt.t, text.slot(), &pass);
    if (st == NEMX_OK) written = emit(opt, "statics.csv", text.str());
  } else if (command == "verify") {
    st = nemx_verify_json(scenario.get(), opt.t, opt.samples, opt.resolution, text.slot(),
                          &pass);
    if (st == NEMX_OK) written = emit(opt, "verify.json", text.str());
  } else if (command == "simulate") {
    LibString intervals;
    const bool want_intervals = !out_dir(opt).empty();
    st = nemx_simulate(scenario.get(), text.slot(), want_intervals ? intervals.slot() : nullptr);
    if (st == NEMX_OK) {
      written = emit(opt, "simulate.json", text.str());
      if (want_intervals) written = emit(opt, "intervals.csv", intervals.str(), false) && written;
    }
  } else if (command == "compare") {
    st = nemx_compare_csv(scenario.get(), text.slot());
    if (st == NEMX_OK) written = emit(opt, "compare.csv", text.str());
  } else if (command == "sweep") {
    st = nemx_sweep_csv(scenario.get(), text.slot());
    if (st == NEMX_OK) written = emit(opt, "sweep.csv", text.str());
  } else if (command == "traces") {
    st = nemx_traces_csv(scenario.get(), text.slot());
    if (st == NEMX_OK) written = emit(opt, "traces.csv", text.str(), out_dir(opt).empty());
  }

  if (st != NEMX_OK) return failure(st);
  if (!written) return kExitValidation;
  if (!pass) {
    std::cerr << "nemx: " << command << ": property check failed\n";
    return kExitProperty;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-optimization of flexible demand and storage under net metering"};
  app.set_version_flag("--version", std::string(nemx_version()));
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"thresholds", "Policy thresholds for one interval"},
      {"decide", "Optimal decisions at given generation values"},
      {"rank", "Device priority classes"},
      {"zones", "Net-zero zones of the four solar customer types"},
      {"statics", "Comparative-statics signs"},
      {"verify", "Certify the policy against the grid oracle"},
      {"simulate", "Run the configured customer type over its traces"},
      {"compare", "Compare the five customer types"},
      {"sweep", "Value-of-storage sweep"},
      {"traces", "Write the scenario's traces as CSV"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opt.config, "Scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Directory for reports (NEMX_OUT_DIR overrides)");
    sub->add_option("--seed", opt.seed, "Seed for synthetic traces and sampling (default 42)");
    sub->add_option("--t", opt.t, "Interval index for single-interval analyses");
    if (name == "verify") {
      sub->add_option("--samples", opt.samples, "Generation samples");
      sub->add_option("--resolution", opt.resolution, "Oracle fine resolution (kWh)");
    }
    if (name == "decide") sub->add_option("--g", opt.g, "Generation values (kWh)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return run(app.get_subcommands().front()->get_name(), opt);
}
