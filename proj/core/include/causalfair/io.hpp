#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>

#include "causalfair/dist.hpp"
#include "causalfair/fairness.hpp"
#include "causalfair/graph.hpp"
#include "causalfair/scm.hpp"

namespace causalfair {

// Edge list: one `from -> to` per line. A line holding a single name declares
// an isolated node. Blank lines and `#` comments are ignored.
// Throws ParseError on malformed lines, bad names, or cyclic/duplicate edges.
CausalDag parse_edge_list(std::istream& in);
CausalDag parse_edge_list(std::string_view text);
std::string format_edge_list(const CausalDag& dag);

// Sample CSV: a header of variable names, then one row per observation with
// non-negative integer states. An optional `weight` column carries counts for
// aggregated rows. Cardinalities are inferred as max(2, largest state + 1).
// Throws ParseError on any schema violation.
SampleSet read_sample_csv(std::istream& in);
SampleSet read_sample_csv_file(const std::string& path);

enum class CsvLayout {
  // One line per distinct tuple with a trailing `weight` column.
  aggregated,
  // One line per observation.
  expanded,
};

void write_sample_csv(std::ostream& out, const SampleSet& samples,
                      CsvLayout layout = CsvLayout::aggregated);

// ScmSpec JSON: {"variables": [{"name", "cardinality", "parents", "cpd"}]}
// or the bare list. `cpd` may be nested to any depth; its leaves are read in
// row-major order. Throws ParseError.
ScmSpec parse_scm_json(std::string_view text);
ScmSpec read_scm_file(const std::string& path);
std::string scm_to_json(const ScmSpec& scm);

// CorrectionPolicy JSON:
//   {"gate": {"0": q0, "1": q1} | {"xor": p},
//    "fairness_policy": p1 | [p0, p1, ...] | {"0": [...], "1": [...]},
//    "flip": {"0": [f00, f01], "1": [f10, f11]}}
// A bare number for fairness_policy is P(Yhat = 1) for a binary prediction.
// Throws ParseError, including for probabilities outside [0, 1].
CorrectionPolicy parse_policy_json(std::string_view text);
CorrectionPolicy read_policy_file(const std::string& path);

// Gaps are printed with 6 decimal places.
std::string to_json(const MetricReport& report);
std::string to_csv(const MetricReport& report);
std::string to_json(const GraphVerdicts& verdicts);
// At most `max_trivial` trivial witnesses are listed; the full count is
// always reported.
std::string to_json(const ImpossibilityVerdict& verdict,
                    std::size_t max_trivial = 20);

// Columns: gate, dp_gap, eo_gap, pp_gap, dp_given_c0, eo_given_yc. The last
// two are empty when the gate never fires.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

std::string read_text_file(const std::string& path);

}  // namespace causalfair
