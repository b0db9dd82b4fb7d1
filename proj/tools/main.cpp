#include <iostream>
#include <vector>

#include "commands.hpp"
#include "torsoseg/errors.hpp"
#include "torsoseg/parallel.hpp"

int main(int argc, char** argv) {
  using namespace torsoseg;
  CLI::App app{"Torso MRI segmentation toolkit: stitching, pseudo-CT, post-processing, "
               "localizers, vertebra labeling, tiled inference and evaluation."};
  app.set_version_flag("--version", std::string(TORSOSEG_VERSION));
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "Flat key=value file; subcommand options as <subcommand>.<option>=value. "
                 "Explicit flags win.");

  cli::Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic step")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker cap (0 = all cores)")->capture_default_str();

  const std::vector<cli::Command> commands = {
      cli::add_stitch(app, g),    cli::add_pseudoct(app, g), cli::add_postproc(app, g),
      cli::add_quadrants(app, g), cli::add_vertebrae(app, g), cli::add_eval(app, g),
      cli::add_infer(app, g),     cli::add_schema(app, g),   cli::add_augment(app, g),
  };

  try {
    app.parse(argc, argv);
    set_thread_count(g.threads);
    for (const auto& c : commands)
      if (c.sub->parsed()) c.run();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
