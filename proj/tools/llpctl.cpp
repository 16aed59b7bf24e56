#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void add_pair_options(CLI::App* cmd, llp::cli::CommandConfig& cfg) {
  cmd->add_option("--plant", cfg.plant, "plant automaton file")->required();
  cmd->add_option("--spec", cfg.spec, "specification automaton file")->required();
  cmd->add_option("--out", cfg.out, "output file (default: stdout)");
}

void add_supervisor_options(CLI::App* cmd, llp::cli::CommandConfig& cfg, std::string& attitude) {
  cmd->add_option("--attitude", attitude, "optimistic | conservative")->check(CLI::IsMember({"optimistic", "conservative"}));
  cmd->add_option("--n", cfg.n, "lookahead window size")->check(CLI::PositiveNumber);
  cmd->add_option("--vlp", cfg.vlp, "off | tree | state | recursive")
      ->check(CLI::IsMember({"off", "tree", "state", "recursive"}));
  cmd->add_flag("--combined-rule", cfg.combined_rule, "VLP: combine max over uncontrollable with min over controllable");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace llp::cli;
  CommandConfig cfg;
  std::string attitude = "optimistic";

  CLI::App app{"Online limited-lookahead supervisory control"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synthesize", "write the supremal controllable sublanguage");
  add_pair_options(synth, cfg);

  auto* sim = app.add_subcommand("simulate", "run an online supervised session");
  add_pair_options(sim, cfg);
  add_supervisor_options(sim, cfg, attitude);
  sim->add_option("--seed", cfg.seed, "random source seed");
  sim->add_option("--steps", cfg.steps, "step cap");
  auto* events = sim->add_option("--events", cfg.events, "scripted event file");
  sim->add_flag("--interactive", cfg.interactive, "read events from stdin")->excludes(events);
  sim->add_option("--expansion-out", cfg.expansion_out, "expansion statistics CSV");

  auto* bounds = app.add_subcommand("bounds", "window-size measures and recommendations");
  add_pair_options(bounds, cfg);

  auto* compare = app.add_subcommand("compare", "closed loop versus the prefix closure of K-up");
  add_pair_options(compare, cfg);
  add_supervisor_options(compare, cfg, attitude);

  auto* atc = app.add_subcommand("atc", "air traffic control scenario");
  atc->add_option("--aircraft", cfg.atc.max_aircraft, "maximum number of aircraft");
  atc->add_flag("--modified", cfg.atc.modified, "amended plant with notification separations");
  atc->add_flag("!--finite-traffic", cfg.atc.recycle_indices, "use each aircraft index once (finite traffic)");
  atc->add_flag("--mark-safe", cfg.atc.mark_safe, "mark every plant state");
  atc->add_flag("!--no-arrivals", cfg.atc.arrivals, "disable arrivals");
  atc->add_flag("--count-all-events", cfg.atc.count_uncontrollable_actions, "notifications count as actions");
  atc->add_option("--emit-dir", cfg.emit_dir, "write subplant automata to this directory");
  atc->add_flag("--count-states", cfg.count_states, "count explicit plant states");
  atc->add_flag("--witness", cfg.atc_witness, "check the empty-supremal witness");
  atc->add_flag("--bounds", cfg.atc_bounds, "explore plant and specification, print window bounds");
  atc->add_option("--budget", cfg.budget, "state budget for explicit exploration");

  try {
    app.parse(argc, argv);
    cfg.attitude = llp::parse_attitude(attitude);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(Exit::parse_error);
  }

  if (*synth) return cmd_synthesize(cfg, std::cout, std::cerr);
  if (*sim) return cmd_simulate(cfg, std::cin, std::cout, std::cerr);
  if (*bounds) return cmd_bounds(cfg, std::cout, std::cerr);
  if (*compare) return cmd_compare(cfg, std::cout, std::cerr);
  return cmd_atc(cfg, std::cout, std::cerr);
}
