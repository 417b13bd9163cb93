#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hypererg/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hypererg: Patterson-Sullivan, BMS and ergodic-average experiments on free groups"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", HYPERERG_VERSION);

  std::string config, out = ".";
  std::optional<std::uint64_t> seed;
  for (const auto& name : hypererg::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "key = value config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  const auto res = hypererg::run(sub, config, seed, out);
  if (res.exit_code != 0) std::cerr << "hypererg " << sub << ": " << res.message << "\n";
  return res.exit_code;
}
