#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "kerrkit/errors.hpp"

using kerrkit::cli::json;

namespace {

const char* kAbout[][2] = {
    {"charts", "chart transitions: isometry residuals, determinant checks, point dumps"},
    {"geodesic", "integrate and classify null geodesics from the config or sampled"},
    {"orbits", "critical-locus sweep with orbit checks"},
    {"cauchy", "Cauchy-surface catalog: gradient surveys and crossing surveys"},
    {"thermal", "projector-route comparison and the exponential-coordinate identity"},
    {"sweep", "empirical spin thresholds"},
};

struct Options {
  std::string config, out = "kerrkit-out";
  int jobs = 1;
  kerrkit::cli::Overrides o;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kerrkit: Kerr geometry, null geodesics, causal structure and thermal projectors"};
  app.set_version_flag("--version", KERRKIT_VERSION);
  app.require_subcommand(1);
  Options opt;
  for (const auto& [name, about] : kAbout) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--config", opt.config, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", opt.o.seed, "seed for quasi-random sampling");
    sub->add_option("--M", opt.o.M, "mass");
    sub->add_option("--a", opt.o.a, "spin");
    sub->add_option("--T", opt.o.T, "T parameter of the configured surfaces (cauchy)");
    sub->add_option("--n", opt.o.n, "sample count or grid size of the command");
    if (std::string(name) == "thermal") sub->add_option("--kappa", opt.o.kappa, "surface gravity");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  json user = json::object();
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    try {
      user = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "kerrkit: " << opt.config << ": " << e.what() << "\n";
      return 2;
    }
  }
  try {
    const auto r = kerrkit::cli::run_with_config(command, user, opt.o, opt.out, opt.jobs);
    const json& s = r.summary;
    if (r.exit_code == 2) {
      std::cerr << "kerrkit: schema error: " << s["error"].get<std::string>() << "\n";
      return 2;
    }
    std::cout << command << ": " << s["assertions"]["total"] << " assertions, " << s["assertions"]["failed"]
              << " failed; config " << s["config_hash"].get<std::string>() << "; summary in " << opt.out << "/"
              << command << "_summary.json\n";
    if (r.exit_code == 1)
      std::cerr << "kerrkit: FAIL " << s["first_failure"]["record"].get<std::string>() << ": "
                << s["first_failure"]["detail"].get<std::string>() << "\n";
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "kerrkit: " << e.what() << "\n";
    return 1;
  }
}
