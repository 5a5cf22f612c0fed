#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "causalfair/error.hpp"
#include "causalfair/fairness.hpp"

namespace causalfair {

std::string_view to_string(TrivialReason reason) {
  switch (reason) {
    case TrivialReason::none:
      return "none";
    case TrivialReason::precondition_failed:
      return "precondition_failed";
    case TrivialReason::deterministic_prediction:
      return "deterministic_prediction";
  }
  return "unknown";
}

std::uint64_t scan_grid_size(int resolution) {
  // C(resolution + 7, 7), exact at every step of the running product.
  std::uint64_t result = 1;
  for (std::uint64_t k = 1; k <= 7; ++k) {
    result = result * (static_cast<std::uint64_t>(resolution) + k) / k;
  }
  return result;
}

JointTable scan_table_joint(const ScanTable& table, int resolution,
                            const FairnessTriple& triple) {
  std::vector<double> probs(8);
  for (std::size_t i = 0; i < 8; ++i) {
    probs[i] = static_cast<double>(table.counts[i]) / resolution;
  }
  return JointTable({{triple.sensitive, 2}, {triple.truth, 2},
                     {triple.prediction, 2}},
                    std::move(probs));
}

namespace {

struct PartialVerdict {
  std::uint64_t tested = 0;
  std::uint64_t precondition_passing = 0;
  std::uint64_t deterministic_prediction = 0;
  std::vector<ScanTable> witnesses;
  std::vector<ScanTable> trivial_witnesses;

  void merge(PartialVerdict&& other) {
    tested += other.tested;
    precondition_passing += other.precondition_passing;
    deterministic_prediction += other.deterministic_prediction;
    witnesses.insert(witnesses.end(), other.witnesses.begin(),
                     other.witnesses.end());
    trivial_witnesses.insert(trivial_witnesses.end(),
                             other.trivial_witnesses.begin(),
                             other.trivial_witnesses.end());
  }
};

class GridWorker {
 public:
  GridWorker(int resolution, double epsilon, double tau,
             const ScanOptions& options)
      : resolution_(resolution),
        epsilon_(epsilon),
        tau_(tau),
        options_(options) {}

  // Every composition whose first entry equals `first`.
  PartialVerdict run(int first) {
    PartialVerdict out;
    ScanTable table;
    table.counts[0] = first;
    fill(table, 1, resolution_ - first, out);
    return out;
  }

 private:
  void fill(ScanTable& table, std::size_t slot, int remaining,
            PartialVerdict& out) {
    if (slot == 7) {
      table.counts[7] = remaining;
      evaluate(table, out);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      table.counts[slot] = c;
      fill(table, slot + 1, remaining - c, out);
    }
  }

  void evaluate(const ScanTable& grid_point, PartialVerdict& out) {
    ++out.tested;
    const JointTable joint = scan_table_joint(grid_point, resolution_, triple_);
    const MetricReport report = audit(joint, triple_, epsilon_, tau_);
    if (report.preconditions_met) ++out.precondition_passing;
    if (report.satisfied.count() < 2) return;

    ScanTable table = grid_point;
    table.satisfied = report.satisfied;
    if (!report.preconditions_met) {
      table.reason = TrivialReason::precondition_failed;
      out.trivial_witnesses.push_back(table);
    } else if (options_.exempt_deterministic_prediction &&
               prediction_determines_truth(joint, triple_)) {
      table.reason = TrivialReason::deterministic_prediction;
      ++out.deterministic_prediction;
      out.trivial_witnesses.push_back(table);
    } else {
      out.witnesses.push_back(table);
    }
  }

  int resolution_;
  double epsilon_;
  double tau_;
  ScanOptions options_;
  FairnessTriple triple_;
};

}  // namespace

ImpossibilityVerdict impossibility_scan(int resolution, double epsilon,
                                        double tau,
                                        const ScanOptions& options) {
  if (resolution < kMinScanResolution) {
    throw InvalidArgumentError(fmt::format(
        "scan resolution must be >= {}, got {}", kMinScanResolution, resolution));
  }
  if (!(epsilon > 0.0) || !(tau > 0.0) || !(epsilon < tau / 2.0)) {
    throw InvalidArgumentError(
        fmt::format("scan needs 0 < epsilon < tau / 2 (epsilon={}, tau={})",
                    epsilon, tau));
  }

  unsigned threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(resolution) + 1);

  // Work items are the values of the first table entry; results are merged
  // under a lock and sorted afterwards, so the outcome is order-independent.
  std::atomic<int> next{0};
  std::mutex merge_mutex;
  PartialVerdict total;
  auto work = [&] {
    GridWorker worker(resolution, epsilon, tau, options);
    PartialVerdict local;
    for (int first = next++; first <= resolution; first = next++) {
      local.merge(worker.run(first));
    }
    const std::lock_guard lock(merge_mutex);
    total.merge(std::move(local));
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  std::sort(total.witnesses.begin(), total.witnesses.end());
  std::sort(total.trivial_witnesses.begin(), total.trivial_witnesses.end());

  ImpossibilityVerdict verdict;
  verdict.resolution = resolution;
  verdict.epsilon = epsilon;
  verdict.tau = tau;
  verdict.tested = total.tested;
  verdict.precondition_passing = total.precondition_passing;
  verdict.deterministic_prediction = total.deterministic_prediction;
  verdict.multi_satisfying = total.witnesses.size();
  verdict.witnesses = std::move(total.witnesses);
  verdict.trivial_witnesses = std::move(total.trivial_witnesses);
  return verdict;
}

}  // namespace causalfair
