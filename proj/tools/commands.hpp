#pragma once

#include <cstdint>
#include <functional>

#include <CLI11.hpp>

namespace torsoseg::cli {

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

// A registered subcommand and the action to run once parsing succeeded.
struct Command {
  CLI::App* sub = nullptr;
  std::function<void()> run;
};

Command add_stitch(CLI::App& app, const Globals& g);
Command add_pseudoct(CLI::App& app, const Globals& g);
Command add_postproc(CLI::App& app, const Globals& g);
Command add_quadrants(CLI::App& app, const Globals& g);
Command add_vertebrae(CLI::App& app, const Globals& g);
Command add_eval(CLI::App& app, const Globals& g);
Command add_infer(CLI::App& app, const Globals& g);
Command add_schema(CLI::App& app, const Globals& g);
Command add_augment(CLI::App& app, const Globals& g);

}  // namespace torsoseg::cli
