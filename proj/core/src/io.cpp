#include "causalfair/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "causalfair/error.hpp"

namespace causalfair {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Int>
bool parse_uint(std::string_view text, Int& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::string gap(double value) { return fmt::format("{:.6f}", value); }

std::string flags_json(const MetricFlags& flags) {
  return fmt::format(R"({{"dp": {}, "eo": {}, "pp": {}}})", flags.dp, flags.eo,
                     flags.pp);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CausalDag parse_edge_list(std::istream& in) {
  std::vector<std::string> nodes;
  std::set<std::string> declared;
  std::vector<Edge> edges;
  auto declare = [&](std::string_view name, std::size_t line_no) {
    if (!is_valid_node_name(name)) {
      throw ParseError(
          fmt::format("line {}: invalid node name '{}'", line_no, name));
    }
    if (declared.emplace(name).second) nodes.emplace_back(name);
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;
    const auto arrow = body.find("->");
    if (arrow == std::string_view::npos) {
      declare(body, line_no);
      continue;
    }
    const auto from = trim(body.substr(0, arrow));
    const auto to = trim(body.substr(arrow + 2));
    if (to.find("->") != std::string_view::npos) {
      throw ParseError(fmt::format("line {}: expected one edge per line", line_no));
    }
    declare(from, line_no);
    declare(to, line_no);
    edges.push_back({std::string(from), std::string(to)});
  }
  try {
    return CausalDag(std::move(nodes), edges);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

CausalDag parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

std::string format_edge_list(const CausalDag& dag) {
  std::string out;
  std::vector<bool> touched(dag.size(), false);
  for (const auto& e : dag.edges()) {
    touched[dag.index_of(e.from)] = true;
    touched[dag.index_of(e.to)] = true;
  }
  for (std::size_t i = 0; i < dag.size(); ++i) {
    if (!touched[i]) out += dag.name_of(i) + "\n";
  }
  for (const auto& e : dag.edges()) out += fmt::format("{} -> {}\n", e.from, e.to);
  return out;
}

SampleSet read_sample_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++line_no;
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) throw ParseError("CSV has no header row");
  header = split(header_line, ',');

  std::optional<std::size_t> weight_col;
  std::vector<std::string> names;
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!seen.insert(header[i]).second) {
      throw ParseError(fmt::format("duplicate CSV column '{}'", header[i]));
    }
    if (header[i] == "weight") {
      weight_col = i;
      continue;
    }
    if (!is_valid_node_name(header[i])) {
      throw ParseError(fmt::format("invalid CSV column name '{}'", header[i]));
    }
    names.emplace_back(header[i]);
  }
  if (names.empty()) throw ParseError("CSV has no variable columns");

  std::vector<std::pair<std::vector<int>, std::uint64_t>> rows;
  std::vector<int> max_state(names.size(), 1);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ParseError(fmt::format("line {}: expected {} fields, got {}", line_no,
                                   header.size(), cells.size()));
    }
    std::vector<int> states;
    states.reserve(names.size());
    std::uint64_t weight = 1;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (weight_col && i == *weight_col) {
        if (!parse_uint(cells[i], weight)) {
          throw ParseError(fmt::format("line {}: bad weight '{}'", line_no, cells[i]));
        }
        continue;
      }
      int state = 0;
      if (!parse_uint(cells[i], state) || state < 0) {
        throw ParseError(fmt::format(
            "line {}: state '{}' is not a non-negative integer", line_no, cells[i]));
      }
      max_state[states.size()] = std::max(max_state[states.size()], state);
      states.push_back(state);
    }
    rows.emplace_back(std::move(states), weight);
  }

  std::vector<VariableSpec> variables;
  for (std::size_t i = 0; i < names.size(); ++i) {
    variables.push_back({names[i], max_state[i] + 1});
  }
  SampleSet samples(std::move(variables));
  for (const auto& [states, weight] : rows) samples.add(states, weight);
  if (samples.total() == 0) throw ParseError("CSV holds no observations");
  return samples;
}

SampleSet read_sample_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  return read_sample_csv(in);
}

void write_sample_csv(std::ostream& out, const SampleSet& samples,
                      CsvLayout layout) {
  std::string header;
  for (const auto& v : samples.variables()) {
    if (!header.empty()) header += ',';
    header += v.name;
  }
  if (layout == CsvLayout::aggregated) header += ",weight";
  out << header << '\n';
  for (const auto& [states, count] : samples.counts()) {
    std::string row;
    for (int s : states) {
      if (!row.empty()) row += ',';
      row += std::to_string(s);
    }
    if (layout == CsvLayout::aggregated) {
      out << row << ',' << count << '\n';
    } else {
      for (std::uint64_t i = 0; i < count; ++i) out << row << '\n';
    }
  }
}

namespace {

void flatten_leaves(const json& node, std::vector<double>& out) {
  if (node.is_array()) {
    for (const auto& child : node) flatten_leaves(child, out);
  } else if (node.is_number()) {
    out.push_back(node.get<double>());
  } else {
    throw ParseError("CPD entries must be numbers");
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("invalid JSON: {}", e.what()));
  }
}

double probability(const json& node, std::string_view what) {
  if (!node.is_number()) throw ParseError(fmt::format("{} must be a number", what));
  const double p = node.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParseError(fmt::format("{} = {} is outside [0, 1]", what, p));
  }
  return p;
}

std::vector<double> probability_row(const json& node, std::string_view what) {
  if (node.is_number()) {
    const double p = probability(node, what);
    return {1.0 - p, p};
  }
  if (!node.is_array()) {
    throw ParseError(fmt::format("{} must be a number or an array", what));
  }
  std::vector<double> row;
  for (const auto& entry : node) row.push_back(probability(entry, what));
  return row;
}

// {"0": x, "1": y} keyed by group index, returned densely.
std::vector<json> by_group(const json& node, std::string_view what) {
  if (!node.is_object()) throw ParseError(fmt::format("{} must be an object", what));
  std::vector<json> out;
  for (const auto& [key, value] : node.items()) {
    std::size_t group = 0;
    if (!parse_uint(std::string_view(key), group) || group > 64) {
      throw ParseError(fmt::format("{}: '{}' is not a group index", what, key));
    }
    if (out.size() <= group) out.resize(group + 1);
    out[group] = value;
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    if (out[g].is_null()) {
      throw ParseError(fmt::format("{}: missing entry for group {}", what, g));
    }
  }
  return out;
}

}  // namespace

ScmSpec parse_scm_json(std::string_view text) {
  const json doc = parse_json(text);
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("variables")) throw ParseError("SCM JSON needs 'variables'");
    list = &doc.at("variables");
  }
  if (!list->is_array()) throw ParseError("SCM variables must be an array");

  std::vector<ScmVariable> variables;
  for (const auto& entry : *list) {
    if (!entry.is_object() || !entry.contains("name") || !entry.contains("cpd")) {
      throw ParseError("each SCM variable needs 'name' and 'cpd'");
    }
    ScmVariable v;
    if (!entry.at("name").is_string()) throw ParseError("variable name must be a string");
    v.name = entry.at("name").get<std::string>();
    if (entry.contains("cardinality")) {
      if (!entry.at("cardinality").is_number_integer()) {
        throw ParseError(fmt::format("'{}': cardinality must be an integer", v.name));
      }
      v.cardinality = entry.at("cardinality").get<int>();
    }
    if (entry.contains("parents")) {
      if (!entry.at("parents").is_array()) {
        throw ParseError(fmt::format("'{}': parents must be an array", v.name));
      }
      for (const auto& p : entry.at("parents")) {
        if (!p.is_string()) throw ParseError("parent names must be strings");
        v.parents.push_back(p.get<std::string>());
      }
    }
    if (v.cardinality < 2) {
      throw ParseError(fmt::format("'{}': cardinality must be >= 2", v.name));
    }
    std::vector<double> leaves;
    flatten_leaves(entry.at("cpd"), leaves);
    const auto card = static_cast<std::size_t>(v.cardinality);
    if (leaves.empty() || leaves.size() % card != 0) {
      throw ParseError(fmt::format("'{}': CPD size {} is not a multiple of {}",
                                   v.name, leaves.size(), card));
    }
    for (std::size_t i = 0; i < leaves.size(); i += card) {
      v.cpd.emplace_back(leaves.begin() + static_cast<std::ptrdiff_t>(i),
                         leaves.begin() + static_cast<std::ptrdiff_t>(i + card));
    }
    variables.push_back(std::move(v));
  }
  try {
    return ScmSpec(std::move(variables));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

ScmSpec read_scm_file(const std::string& path) {
  return parse_scm_json(read_text_file(path));
}

std::string scm_to_json(const ScmSpec& scm) {
  json list = json::array();
  for (const auto& v : scm.variables()) {
    list.push_back({{"name", v.name},
                    {"cardinality", v.cardinality},
                    {"parents", v.parents},
                    {"cpd", v.cpd}});
  }
  return json{{"variables", list}}.dump(2) + "\n";
}

CorrectionPolicy parse_policy_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("policy must be a JSON object");
  CorrectionPolicy policy;

  if (doc.contains("gate")) {
    const json& gate = doc.at("gate");
    if (gate.is_object() && gate.contains("xor")) {
      if (gate.size() != 1) throw ParseError("xor gate takes no other keys");
      policy.gate_mode = GateMode::xor_noise;
      policy.u_c_prob = probability(gate.at("xor"), "gate.xor");
    } else {
      policy.gate.clear();
      for (const auto& q : by_group(gate, "gate")) {
        policy.gate.push_back(probability(q, "gate"));
      }
    }
  }
  if (doc.contains("fairness_policy")) {
    const json& fp = doc.at("fairness_policy");
    policy.fairness_policy.clear();
    if (fp.is_object()) {
      for (const auto& row : by_group(fp, "fairness_policy")) {
        policy.fairness_policy.push_back(probability_row(row, "fairness_policy"));
      }
    } else {
      policy.fairness_policy.push_back(probability_row(fp, "fairness_policy"));
    }
  }
  if (doc.contains("flip")) {
    for (const auto& row : by_group(doc.at("flip"), "flip")) {
      if (!row.is_array()) {
        throw ParseError("flip entries must be arrays indexed by label");
      }
      policy.flip.push_back(probability_row(row, "flip"));
    }
  }
  try {
    policy.validate();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return policy;
}

CorrectionPolicy read_policy_file(const std::string& path) {
  return parse_policy_json(read_text_file(path));
}

std::string to_json(const MetricReport& report) {
  return fmt::format(
      "{{\n"
      "  \"dp_gap\": {},\n"
      "  \"eo_gap\": {},\n"
      "  \"pp_gap\": {},\n"
      "  \"calibration_dep\": {},\n"
      "  \"bias_dep\": {},\n"
      "  \"satisfied\": {},\n"
      "  \"preconditions_met\": {},\n"
      "  \"epsilon\": {},\n"
      "  \"tau\": {}\n"
      "}}\n",
      gap(report.dp_gap), gap(report.eo_gap), gap(report.pp_gap),
      gap(report.calibration_dep), gap(report.bias_dep),
      flags_json(report.satisfied), report.preconditions_met, report.epsilon,
      report.tau);
}

std::string to_csv(const MetricReport& report) {
  return fmt::format(
      "dp_gap,eo_gap,pp_gap,calibration_dep,bias_dep,dp_satisfied,eo_satisfied,"
      "pp_satisfied,preconditions_met,epsilon,tau\n"
      "{},{},{},{},{},{},{},{},{},{},{}\n",
      gap(report.dp_gap), gap(report.eo_gap), gap(report.pp_gap),
      gap(report.calibration_dep), gap(report.bias_dep), report.satisfied.dp,
      report.satisfied.eo, report.satisfied.pp, report.preconditions_met,
      report.epsilon, report.tau);
}

std::string to_json(const GraphVerdicts& v) {
  return fmt::format(
      "{{\n"
      "  \"dp_implied\": {},\n"
      "  \"eo_implied\": {},\n"
      "  \"pp_implied\": {},\n"
      "  \"calibration_possible\": {},\n"
      "  \"bias_possible\": {}\n"
      "}}\n",
      v.dp_implied, v.eo_implied, v.pp_implied, v.calibration_possible,
      v.bias_possible);
}

namespace {

std::string scan_table_json(const ScanTable& table) {
  return fmt::format(R"({{"counts": [{}], "satisfied": {}, "reason": "{}"}})",
                     fmt::join(table.counts, ", "), flags_json(table.satisfied),
                     to_string(table.reason));
}

std::string scan_table_list(const std::vector<ScanTable>& tables,
                            std::size_t limit) {
  if (tables.empty() || limit == 0) return "[]";
  std::string out = "[\n";
  const std::size_t n = std::min(limit, tables.size());
  for (std::size_t i = 0; i < n; ++i) {
    out += "    " + scan_table_json(tables[i]);
    out += i + 1 < n ? ",\n" : "\n";
  }
  return out + "  ]";
}

}  // namespace

std::string to_json(const ImpossibilityVerdict& v, std::size_t max_trivial) {
  return fmt::format(
      "{{\n"
      "  \"grid_resolution\": {},\n"
      "  \"epsilon\": {},\n"
      "  \"tau\": {},\n"
      "  \"table_order\": \"counts[a*4 + y*2 + yhat] / grid_resolution\",\n"
      "  \"tested\": {},\n"
      "  \"precondition_passing\": {},\n"
      "  \"multi_satisfying\": {},\n"
      "  \"deterministic_prediction\": {},\n"
      "  \"trivial_witness_count\": {},\n"
      "  \"witnesses\": {},\n"
      "  \"trivial_witnesses\": {}\n"
      "}}\n",
      v.resolution, v.epsilon, v.tau, v.tested, v.precondition_passing,
      v.multi_satisfying, v.deterministic_prediction, v.trivial_witnesses.size(),
      scan_table_list(v.witnesses, v.witnesses.size()),
      scan_table_list(v.trivial_witnesses, max_trivial));
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "gate,dp_gap,eo_gap,pp_gap,dp_given_c0,eo_given_yc\n";
  for (const auto& p : sweep.points) {
    out << fmt::format("{},{},{},{},", p.gate, gap(p.report.dp_gap),
                       gap(p.report.eo_gap), gap(p.report.pp_gap));
    if (p.modified) {
      out << gap(p.modified->dp_given_c0) << ',' << gap(p.modified->eo_given_yc);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace causalfair
