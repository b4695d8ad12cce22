#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "penbench/acceptance.hpp"
#include "penbench/bit_sampling.hpp"
#include "penbench/config_file.hpp"
#include "penbench/errors.hpp"
#include "penbench/harness.hpp"
#include "penbench/oracle.hpp"
#include "penbench/transcript_json.hpp"

using namespace penbench;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAcceptance = 3;

/// Options shared by run, sweep, play and instance dump. CLI values override
/// the config file, which overrides the defaults.
struct ExperimentArgs {
  std::string config_path;
  std::string strategy, instance, order, out, format, success;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> trials, seed, test_cap;
  std::optional<unsigned> workers;
  std::optional<double> epsilon;
  std::vector<std::size_t> n_list;
  bool no_smooth = false;
  bool timing = false;

  void attach(CLI::App* app, bool with_sweep) {
    app->add_option("--config", config_path, "JSON or TOML config file")->check(CLI::ExistingFile);
    app->add_option("--strategy,-s", strategy, "strategy spec, e.g. iid-mix or threshold:2");
    app->add_option("--instance,-i", instance, "instance spec, e.g. iid(exp(1),1024) or powers(10)");
    app->add_option("--n", n, "n for bare distributions and {n} substitution");
    app->add_option("--order", order, "uniform|fixed|ascending|descending|alternating");
    app->add_option("--trials,-t", trials, "number of trials");
    app->add_option("--seed", seed, "64-bit master seed");
    app->add_option("--out,-o", out, "output path (default: standard output)");
    app->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--workers,-j", workers, "worker threads")->check(CLI::Range(1u, 1024u));
    app->add_option("--epsilon", epsilon, "smoothing width for discrete laws (0: automatic)");
    app->add_option("--success", success, "success fraction of the benchmark: a number or 'gap'");
    app->add_option("--test-cap", test_cap, "tests allowed per step");
    app->add_flag("--no-smooth", no_smooth, "use raw discrete laws in quantile strategies");
    app->add_flag("--timing", timing, "report wall time (breaks byte-identical reports)");
    if (with_sweep) app->add_option("--n-list", n_list, "ascending n values")->delimiter(',');
  }

  ExperimentConfig build() const {
    ExperimentConfig config;
    if (!config_path.empty()) apply_config(load_config_file(config_path), config);
    if (!strategy.empty()) config.strategy = strategy;
    if (!instance.empty()) config.instance = instance;
    if (n) config.n = n;
    if (!order.empty()) config.order = order;
    if (trials) config.trials = *trials;
    if (seed) config.seed = *seed;
    if (!out.empty()) config.out = out;
    if (!format.empty()) config.format = format;
    if (workers) config.workers = *workers;
    if (epsilon) config.prophet.epsilon = *epsilon;
    if (!success.empty()) config.success_fraction = success;
    if (test_cap) config.test_cap = *test_cap;
    if (no_smooth) config.prophet.smooth = false;
    if (timing) config.timing = true;
    if (!n_list.empty()) config.n_list = n_list;
    if (config.trials == 0) throw ConfigError("trials must be >= 1");
    return config;
  }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ResourceError("cannot write '" + path + "'");
  file << text;
  if (!file) throw ResourceError("write to '" + path + "' failed");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penbench: online pen testing simulations, algorithms and exact oracles"};
  app.require_subcommand(1);

  ExperimentArgs run_args;
  auto* run = app.add_subcommand("run", "run one experiment and print its report");
  run_args.attach(run, false);

  ExperimentArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment for each n in --n-list");
  sweep_args.attach(sweep_cmd, true);

  ExperimentArgs play_args;
  std::uint64_t play_index = 0;
  auto* play_cmd = app.add_subcommand("play", "play a single trial and print its transcript");
  play_args.attach(play_cmd, false);
  play_cmd->add_option("--index", play_index, "trial index");

  AcceptanceOptions verify_options;
  std::string verify_format = "text", verify_out;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_flag("--fast", verify_options.fast, "a tenth of the trials with widened slacks");
  verify->add_option("--only", verify_options.only, "criterion ids to run")->delimiter(',')->check(
      CLI::Range(1, kCriterionCount));
  verify->add_option("--timeout", verify_options.timeout_seconds, "seconds per criterion");
  verify->add_option("--seed", verify_options.seed, "master seed");
  verify->add_option("--workers,-j", verify_options.workers, "worker threads (0: all cores)");
  verify->add_option("--format", verify_format, "text|json")->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--out,-o", verify_out, "also write the JSON result here");

  std::optional<std::uint64_t> oracle_harmonic;
  std::vector<unsigned> oracle_lemma, oracle_dp;
  auto* oracle = app.add_subcommand("oracle", "exact small-scale values as JSON");
  oracle->add_option("--harmonic", oracle_harmonic, "H_n exactly");
  oracle->add_option("--lemma62", oracle_lemma, "k theta delta: level-game optimum and bound")->expected(3);
  oracle->add_option("--dp", oracle_dp, "multiplicities c_0 c_1 ...: optimal online value")->expected(1, 6);

  auto* bitgame = app.add_subcommand("bitgame", "bit sampling game");
  bitgame->require_subcommand(1);
  unsigned max_len = 14;
  int offset = 2;
  auto* bit_verify = bitgame->add_subcommand("verify", "exhaustive minimum win probability");
  bit_verify->add_option("--max-len", max_len, "longest sequence")->check(CLI::Range(1u, 20u));
  bit_verify->add_option("--offset", offset, "commit probability 2^-(delta+offset)");
  std::string bits_text;
  auto* bit_prob = bitgame->add_subcommand("prob", "exact win probability of one sequence");
  bit_prob->add_option("bits", bits_text, "0/1 string")->required();
  bit_prob->add_option("--offset", offset, "commit probability 2^-(delta+offset)");

  auto* instance_cmd = app.add_subcommand("instance", "instance utilities");
  instance_cmd->require_subcommand(1);
  ExperimentArgs dump_args;
  std::uint64_t dump_index = 0;
  auto* instance_dump = instance_cmd->add_subcommand("dump", "write one sampled instance as JSON");
  dump_args.attach(instance_dump, false);
  instance_dump->add_option("--index", dump_index, "trial index to materialize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      ExperimentConfig config = run_args.build();
      Report report = run_experiment(config);
      emit(config.format == "csv" ? reports_to_csv({report}) : dump(report_to_json(report)), config.out);
    } else if (*sweep_cmd) {
      ExperimentConfig config = sweep_args.build();
      SweepResult result = sweep(config);
      emit(config.format == "csv" ? sweep_to_csv(result) : dump(sweep_to_json(result)), config.out);
    } else if (*play_cmd) {
      ExperimentConfig config = play_args.build();
      TrialResult trial = play_single(config, play_index);
      json j = transcript_to_json(trial.game);
      j["benchmark"] = trial.benchmark;
      j["arrivals"] = trial.arrived;
      emit(dump(j), config.out);
    } else if (*verify) {
      auto results = run_acceptance(verify_options);
      json j = acceptance_to_json(results);
      if (verify_format == "json") {
        std::cout << dump(j);
      } else {
        for (const auto& r : results) std::cout << format_result_line(r) << "\n";
      }
      if (!verify_out.empty()) emit(dump(j), verify_out);
      int code = j["passed"].get<bool>() ? kExitOk : kExitAcceptance;
      // A timed-out criterion may still be running on a detached thread.
      std::cout.flush();
      std::_Exit(code);
    } else if (*oracle) {
      json j = json::object();
      if (oracle_harmonic) {
        mpq_class h = harmonic(*oracle_harmonic);
        j["harmonic"] = {{"n", *oracle_harmonic}, {"exact", h.get_str()}, {"value", h.get_d()}};
      }
      if (!oracle_lemma.empty()) {
        auto bound = lemma62_bound(oracle_lemma[0], oracle_lemma[1], oracle_lemma[2]);
        auto dp = lemma62_optimal_dp(oracle_lemma[0], oracle_lemma[1], oracle_lemma[2]);
        j["lemma62"] = {{"k", oracle_lemma[0]}, {"theta", oracle_lemma[1]}, {"delta", oracle_lemma[2]},
                        {"good", bound.good.get_str()}, {"bad", bound.bad.get_str()},
                        {"ratio", bound.ratio.get_str()}, {"cap", bound.cap.get_str()},
                        {"within_cap", bound.within_cap}, {"dp", dp.value.get_str()}, {"equal", dp.equal}};
      }
      if (!oracle_dp.empty()) {
        mpq_class v = optimal_online_dp(oracle_dp);
        j["dp"] = {{"counts", oracle_dp}, {"exact", v.get_str()}, {"value", v.get_d()}};
      }
      if (j.empty()) throw ConfigError("oracle needs --harmonic, --lemma62 or --dp");
      std::cout << dump(j);
    } else if (*bit_verify) {
      auto minimum = min_win_prob_exhaustive(max_len, offset);
      auto inductive = check_inductive_bound(max_len, offset);
      json j = {{"max_len", max_len},
                {"offset", offset},
                {"minimum", minimum.minimum.get_str()},
                {"minimum_value", minimum.minimum.get_d()},
                {"witness", bits_to_string(minimum.witness)},
                {"sequences", minimum.sequences_checked},
                {"at_least_one_sixth", minimum.minimum >= mpq_class(1, 6)},
                {"suffix_bound_holds", inductive.holds},
                {"suffix_states", inductive.states_checked}};
      if (!inductive.holds) j["suffix_counterexample"] = bits_to_string(inductive.counterexample);
      std::cout << dump(j);
    } else if (*bit_prob) {
      BitSequence bits;
      try {
        bits = parse_bits(bits_text);
      } catch (const ValidationError& e) {
        throw ConfigError(e.what());
      }
      auto p = exact_win_prob(bits, offset);
      json j = {{"bits", bits_text}, {"valid", is_valid_sequence(bits)}, {"value", double(p.value)}};
      if (p.exact) j["exact"] = p.exact->get_str();
      std::cout << dump(j);
    } else if (*instance_dump) {
      ExperimentConfig config = dump_args.build();
      auto model = parse_instance(config.instance, config.n, config.order);
      emit(dump(instance_to_json(model->sample_instance(config.seed, dump_index))), config.out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOk;
}
