// Command-line simulator: dispatches one experiment described by a config
// file and writes its artifacts to the output directory.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "diffudict/config.hpp"
#include "diffudict/errors.hpp"
#include "diffudict/experiments.hpp"

namespace {

constexpr const char* kUsage =
    "usage: diffudict <infer|learn|novelty|bicluster|bench> --config <path> [--seed n] "
    "[--out dir]\n";

int fail_usage(const std::string& message) {
  std::fprintf(stderr, "diffudict: %s\n%s", message.c_str(), kUsage);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return fail_usage("missing command");
  const std::string command = argv[1];

  std::string config_path;
  std::string seed;
  std::string out_dir = ".";
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) config_path = argv[++i];
    else if (arg == "--seed" && i + 1 < argc) seed = argv[++i];
    else if (arg == "--out" && i + 1 < argc) out_dir = argv[++i];
    else return fail_usage("unrecognized or incomplete argument '" + arg + "'");
  }
  if (config_path.empty()) return fail_usage("--config is required");

  try {
    diffudict::Config cfg = diffudict::Config::parse_file(config_path);
    if (!seed.empty()) cfg.set("seed", seed);
    diffudict::run_experiment(command, cfg, out_dir);
    return 0;
  } catch (const diffudict::ConfigError& e) {
    std::fprintf(stderr, "diffudict: %s\n", e.what());
    return 2;
  } catch (const diffudict::ParseError& e) {
    std::fprintf(stderr, "diffudict: %s\n", e.what());
    return 2;
  } catch (const diffudict::ShapeError& e) {
    std::fprintf(stderr, "diffudict: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "diffudict: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "diffudict: %s\n", e.what());
    return 1;
  }
}
