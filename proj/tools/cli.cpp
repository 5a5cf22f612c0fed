#include "cli.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "causalfair/error.hpp"
#include "causalfair/fairness.hpp"
#include "causalfair/graph.hpp"
#include "causalfair/io.hpp"
#include "causalfair/scm.hpp"

namespace causalfair::cli {

namespace {

// Carries the exit code for failures that are not library errors.
struct ExitRequest {
  int code;
  std::string message;
};

struct CliConfig {
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
  double tau = kDefaultTau;
  double smoothing = 0.0;
  int resolution = 20;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ExitRequest{kInputError, fmt::format("cannot write '{}'", path)};
  file << text;
}

CausalDag load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  return parse_edge_list(in);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal fairness audits, d-separation queries and correction sweeps",
               "causalfair"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  CliConfig config;
  std::function<int()> action;

  // dsep ---------------------------------------------------------------------
  std::string graph_path;
  std::string node_x;
  std::string node_y;
  std::vector<std::string> given;
  auto* dsep = app.add_subcommand("dsep", "Decide x _||_ y | given in an edge-list DAG");
  dsep->add_option("graph", graph_path, "Edge-list file (`from -> to` per line)")
      ->required();
  dsep->add_option("x", node_x, "First node")->required();
  dsep->add_option("y", node_y, "Second node")->required();
  dsep->add_option("-z,--given", given, "Conditioning nodes")->delimiter(',');
  dsep->callback([&] {
    action = [&] {
      const CausalDag dag = load_graph(graph_path);
      const bool separated = d_separated(dag, node_x, node_y, given);
      out << "d-separated: " << (separated ? "true" : "false") << '\n';
      return kOk;
    };
  });

  // verdicts -----------------------------------------------------------------
  std::string verdict_graph;
  std::string canonical_name;
  FairnessTriple triple;
  auto* verdicts = app.add_subcommand(
      "verdicts", "Metrics implied by a data-generating DAG over A, Y, Yhat");
  verdicts->add_option("graph", verdict_graph, "Edge-list file");
  verdicts->add_option("--canonical", canonical_name,
                       "Use a built-in diagram (dp, eo_chain_ay, ..., correction)");
  verdicts->add_option("--sensitive", triple.sensitive, "Sensitive attribute node")
      ->capture_default_str();
  verdicts->add_option("--truth", triple.truth, "True label node")->capture_default_str();
  verdicts->add_option("--prediction", triple.prediction, "Prediction node")
      ->capture_default_str();
  verdicts->add_option("-o,--output", config.output, "Output path (default stdout)");
  verdicts->callback([&] {
    action = [&] {
      if (verdict_graph.empty() == canonical_name.empty()) {
        throw ExitRequest{kInputError, "give exactly one of GRAPH or --canonical"};
      }
      const CausalDag dag = canonical_name.empty()
                                ? load_graph(verdict_graph)
                                : canonical_graph(parse_canonical_graph(canonical_name));
      emit(to_json(graph_metric_verdicts(dag, triple)), config.output, out);
      return kOk;
    };
  });

  // canonical ----------------------------------------------------------------
  std::string canonical_kind;
  auto* canonical = app.add_subcommand("canonical", "Print a built-in diagram as an edge list");
  canonical->add_option("kind", canonical_kind, "dp, eo_chain_ay, eo_chain_ya, eo_fork, "
                                                "pp_chain_ay, pp_chain_ya, pp_fork, correction")
      ->required();
  canonical->add_option("-o,--output", config.output, "Output path (default stdout)");
  canonical->callback([&] {
    action = [&] {
      emit(format_edge_list(canonical_graph(parse_canonical_graph(canonical_kind))),
           config.output, out);
      return kOk;
    };
  });

  // audit --------------------------------------------------------------------
  std::string csv_path;
  auto* audit_cmd = app.add_subcommand("audit", "Fairness metric report for a sample CSV");
  audit_cmd->add_option("csv", csv_path, "Sample CSV (optional `weight` column)")->required();
  audit_cmd->add_option("--sensitive", triple.sensitive, "Sensitive attribute column")
      ->capture_default_str();
  audit_cmd->add_option("--truth", triple.truth, "True label column")->capture_default_str();
  audit_cmd->add_option("--prediction", triple.prediction, "Prediction column")
      ->capture_default_str();
  audit_cmd->add_option("--epsilon", config.epsilon, "Metric tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  audit_cmd->add_option("--tau", config.tau, "Precondition threshold")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  audit_cmd->add_option("--smoothing", config.smoothing, "Additive smoothing")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  audit_cmd->add_option("--format", config.format, "json or csv")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv"}));
  audit_cmd->add_option("-o,--output", config.output, "Output path (default stdout)");
  audit_cmd->callback([&] {
    action = [&] {
      const SampleSet samples = read_sample_csv_file(csv_path);
      for (const auto& role : {triple.sensitive, triple.truth, triple.prediction}) {
        if (!samples.contains(role)) {
          throw MissingRoleError(fmt::format("CSV has no column '{}'", role));
        }
      }
      const MetricReport report =
          audit(samples, triple, config.epsilon, config.tau, config.smoothing);
      emit(config.format == "csv" ? to_csv(report) : to_json(report), config.output, out);
      return kOk;
    };
  });

  // scan ---------------------------------------------------------------------
  unsigned threads = 0;
  std::size_t max_trivial = 20;
  auto* scan = app.add_subcommand(
      "scan", "Brute-force the impossibility theorem over gridded (A, Y, Yhat) tables");
  scan->add_option("--resolution", config.resolution, "Grid resolution")
      ->capture_default_str()
      ->check(CLI::Range(kMinScanResolution, 40));
  scan->add_option("--epsilon", config.epsilon, "Metric tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  scan->add_option("--tau", config.tau, "Precondition threshold")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  scan->add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  scan->add_option("--max-trivial", max_trivial, "Trivial witnesses to list")
      ->capture_default_str();
  scan->add_option("-o,--output", config.output, "Output path (default stdout)");
  scan->callback([&] {
    if (!(config.epsilon < config.tau / 2.0)) {
      throw CLI::ValidationError("--epsilon", "must be below tau / 2");
    }
    action = [&] {
      ScanOptions options;
      options.threads = threads;
      const auto verdict =
          impossibility_scan(config.resolution, config.epsilon, config.tau, options);
      emit(to_json(verdict, max_trivial), config.output, out);
      return verdict.multi_satisfying == 0 ? kOk : kTheoremViolation;
    };
  });

  // simulate -----------------------------------------------------------------
  std::string scm_path;
  std::uint64_t n = 100000;
  std::string layout = "aggregated";
  auto* simulate = app.add_subcommand("simulate", "Ancestral samples from an SCM JSON file");
  simulate->add_option("scm", scm_path, "SCM JSON file")->required();
  simulate->add_option("-n,--n", n, "Number of observations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  simulate->add_option("--layout", layout, "aggregated (weight column) or expanded")
      ->capture_default_str()
      ->check(CLI::IsMember({"aggregated", "expanded"}));
  simulate->add_option("-o,--output", config.output, "Output CSV (default stdout)");
  simulate->callback([&] {
    action = [&] {
      const ScmSpec scm = read_scm_file(scm_path);
      const SampleSet samples = ancestral_sample(scm, n, config.seed);
      std::ostringstream csv;
      write_sample_csv(csv, samples,
                       layout == "expanded" ? CsvLayout::expanded : CsvLayout::aggregated);
      emit(csv.str(), config.output, out);
      return kOk;
    };
  });

  // sweep --------------------------------------------------------------------
  std::string policy_path;
  std::vector<double> grid;
  int steps = 0;
  auto* sweep = app.add_subcommand(
      "sweep", "Metric gaps of the corrected SCM across disadvantaged gate probabilities");
  sweep->add_option("scm", scm_path, "SCM JSON file")->required();
  sweep->add_option("policy", policy_path, "Correction policy JSON file")->required();
  auto* grid_opt =
      sweep->add_option("--grid", grid, "Comma-separated gate values")->delimiter(',');
  auto* steps_opt = sweep->add_option("--steps", steps, "Evenly spaced grid with k intervals")
                        ->check(CLI::PositiveNumber);
  grid_opt->excludes(steps_opt);
  sweep->add_option("--epsilon", config.epsilon, "Metric tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--tau", config.tau, "Precondition threshold")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--sensitive", triple.sensitive, "Sensitive attribute")
      ->capture_default_str();
  sweep->add_option("--truth", triple.truth, "True label")->capture_default_str();
  sweep->add_option("--prediction", triple.prediction, "Prediction")->capture_default_str();
  sweep->add_option("--seed", config.seed, "Accepted for interface uniformity; sweeps are exact");
  sweep->add_option("-o,--output", config.output, "Output CSV (default stdout)");
  sweep->callback([&] {
    action = [&] {
      if (steps > 0) {
        grid.clear();
        for (int i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) / steps);
      }
      if (grid.empty()) throw ExitRequest{kInputError, "give --grid or --steps"};
      const ScmSpec scm = read_scm_file(scm_path);
      const CorrectionPolicy policy = read_policy_file(policy_path);
      const SweepResult result =
          sweep_gate(scm, policy, grid, config.epsilon, config.tau, triple);
      std::ostringstream csv;
      write_sweep_csv(csv, result);
      emit(csv.str(), config.output, out);
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    return action ? action() : kInputError;
  } catch (const ExitRequest& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const UnknownNodeError& e) {
    err << "error: " << e.what() << '\n';
    return kUnknownNode;
  } catch (const MissingRoleError& e) {
    err << "error: " << e.what() << '\n';
    return kMissingRole;
  } catch (const UnknownVariableError& e) {
    err << "error: " << e.what() << '\n';
    return kMissingRole;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace causalfair::cli
