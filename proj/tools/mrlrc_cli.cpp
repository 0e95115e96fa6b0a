// SPDX-License-Identifier: Apache-2.0
//
// mrlrc simulate | sweep | selftest | analyze
//
// Exit codes: 0 ok, 1 bad config or input, 2 unrecoverable failure pattern,
// 3 acceptance check failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mrlrc/scenario.hpp"
#include "mrlrc/selftest.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kUnrecoverable = 2, kAcceptance = 3 };

std::string transcript_text(const mrlrc::SimulationResult& res) {
  std::ostringstream os;
  mrlrc::write_transcript_csv(os, res.params->field(), res.state->transcript());
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw mrlrc::ConfigError("cannot write " + path);
  out << text;
}

int simulate(const std::string& config, const std::string& transcript) {
  const auto res = mrlrc::simulate(mrlrc::load_scenario(config));
  write_file(transcript, transcript_text(res));
  mrlrc::write_report(std::cout, res);
  std::cout << "transcript    " << transcript << '\n';
  return kOk;
}

int analyze(const std::string& transcript, const std::string& config) {
  std::ifstream in(transcript);
  if (!in) throw mrlrc::ConfigError("cannot open transcript " + transcript);
  std::stringstream recorded;
  recorded << in.rdbuf();
  const auto res = mrlrc::simulate(mrlrc::load_scenario(config));
  if (recorded.str() != transcript_text(res))
    throw mrlrc::ConfigError("transcript " + transcript + " was not produced by config " + config);
  mrlrc::write_report(std::cout, res);
  return kOk;
}

int sweep(const std::string& config, std::uint32_t g_min, std::uint32_t g_max, const std::string& out) {
  const auto rows = mrlrc::sweep(mrlrc::load_sweep_config(config), g_min, g_max);
  std::ostringstream os;
  mrlrc::write_sweep_csv(os, rows);
  if (out.empty() || out == "-") {
    std::cout << os.str();
  } else {
    write_file(out, os.str());
    std::cout << "wrote " << rows.size() << " rows to " << out << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MR-LRC distributed storage simulator and secrecy analysis"};
  app.require_subcommand(1);

  std::string config, transcript = "transcript.csv", out;
  std::uint32_t g_min = 1, g_max = 15;
  bool corrupt = false;
  std::uint64_t seed = mrlrc::SelftestOptions{}.seed;

  auto* sim = app.add_subcommand("simulate", "run a scenario and report formula and oracle secrecy dimensions");
  sim->add_option("config", config, "scenario JSON")->required();
  sim->add_option("--transcript", transcript, "where to write the message transcript CSV");

  auto* sw = app.add_subcommand("sweep", "closed-form secrecy dimensions over a range of g, as CSV");
  sw->add_option("config", config, "sweep JSON")->required();
  sw->add_option("--g-min", g_min, "smallest number of groups");
  sw->add_option("--g-max", g_max, "largest number of groups");
  sw->add_option("--out", out, "output CSV (stdout when omitted)");

  auto* st = app.add_subcommand("selftest", "run the acceptance checks");
  st->add_option("--seed", seed, "seed for the randomized checks");
  st->add_flag("--inject-corrupt-generator", corrupt)->group("");

  std::string recorded;
  auto* an = app.add_subcommand("analyze", "re-analyze a recorded transcript against its scenario");
  an->add_option("transcript", recorded, "transcript CSV")->required();
  an->add_option("config", config, "scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) return simulate(config, transcript);
    if (*sw) return sweep(config, g_min, g_max, out);
    if (*an) return analyze(recorded, config);
    if (*st) return mrlrc::run_acceptance(std::cout, {corrupt, seed}) ? kOk : kAcceptance;
  } catch (const mrlrc::Unrecoverable& e) {
    std::cerr << "unrecoverable: " << e.what() << '\n';
    return kUnrecoverable;
  } catch (const std::invalid_argument& e) {
    // ConfigError and HypothesisError both derive from invalid_argument.
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const mrlrc::PIndependenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
