#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ponp/io/io.hpp"

namespace {

using ponp::io::json;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> kappa;
  std::vector<int> n;
  std::optional<double> tol;
  int threads = 1;
};

json read_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ponp::Error(ponp::ErrorKind::config, "cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ponp::Error(ponp::ErrorKind::config, "malformed JSON in " + path + ": " + e.what());
  }
}

ponp::io::ExperimentConfig load(const Flags& f) {
  json j = read_config_json(f.config);
  if (!j.is_object()) throw ponp::Error(ponp::ErrorKind::config, "config root must be an object");
  if (f.out) j["out"] = *f.out;
  if (f.kappa) j["kappa"] = *f.kappa;
  if (!f.n.empty()) j["n"] = f.n;
  if (f.tol) j["tolerances"]["slope"] = *f.tol;
  return ponp::io::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic expansions of planar orthogonal polynomials, checked against a brute-force oracle"};
  app.require_subcommand(1);
  Flags flags;

  using Command = ponp::io::CommandResult (*)(const ponp::io::ExperimentConfig&, const ponp::io::CommandOptions&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"expand", "solve the hierarchy and write the model", &ponp::io::cmd_expand},
      {"eval", "evaluate the expansion at the configured points", &ponp::io::cmd_eval},
      {"oracle", "orthonormalize by quadrature and write the oracle", &ponp::io::cmd_oracle},
      {"verify", "compare expansion and oracle and fit convergence rates", &ponp::io::cmd_verify},
      {"distributional", "expectation of a test function against |P_N|^2 w", &ponp::io::cmd_distributional},
      {"kernel", "off-spectral kernel and Bernstein-Walsh diagonal", &ponp::io::cmd_kernel},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--kappa", flags.kappa, "expansion order (0..8)");
    sub->add_option("--n", flags.n, "degrees, comma separated and ascending")->delimiter(',');
    sub->add_option("--tol", flags.tol, "slope tolerance for rate checks");
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    subs.emplace_back(sub, fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (const auto& [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    try {
      const auto cfg = ponp::io::stage("config", [&] { return load(flags); });
      const auto result = fn(cfg, ponp::io::CommandOptions{flags.threads});
      for (const auto& path : result.files) std::cout << "wrote " << path.string() << '\n';
      if (result.exit_code != 0) std::cerr << "ponp " << sub->get_name() << ": " << result.message << '\n';
      return result.exit_code;
    } catch (const ponp::Error& e) {
      std::cerr << "ponp " << sub->get_name() << ": " << e.what() << '\n';
      return ponp::exit_code(e.kind());
    } catch (const std::exception& e) {
      std::cerr << "ponp " << sub->get_name() << ": internal error: " << e.what() << '\n';
      return 3;
    }
  }
  return 2;
}
