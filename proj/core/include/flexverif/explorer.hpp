#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "flexverif/fuzzy.hpp"
#include "flexverif/lattice.hpp"
#include "flexverif/model_lang.hpp"
#include "flexverif/pctl.hpp"

namespace flexverif {

enum class SearchMode { Exhaustive, Frontier };

struct StartSpec {
  enum class Kind { Initial, MinOverLabel };
  Kind kind = Kind::Initial;
  std::string label;
};

struct StudyConfig {
  std::string model = "casestudy";  // file path, unless model_builder is set
  std::string query;
  double rho = 0.9;
  SpecLattice lattice;
  std::vector<VagueRequirement> requirements;
  TNorm tnorm{TNormKind::Min};
  SearchMode mode = SearchMode::Exhaustive;
  StartSpec start;
  bool compute_lower = false;
  DeadlockMode deadlock_mode = DeadlockMode::Error;
  double tolerance = 1e-8;
  MuMode mu_mode = MuMode::Strict;
  int threads = 0;  // 0 = hardware concurrency

  /// Per-attribute action-label values attached to file-loaded models
  /// (attribute name -> label -> value).
  std::map<std::string, std::map<std::string, double>> action_attrs;

  /// Overrides file loading when set (built-in case study).
  std::function<Mdp()> model_builder;
};

struct EvalRecord {
  SpecPoint point;
  double p_upper = 0.0;
  std::optional<double> p_lower;
  std::vector<double> mu_each;
  double mu = 0.0;
  bool in_w = false;
};

struct ExplorationResult {
  std::vector<SpecPoint> w;       // lexicographic
  std::vector<SpecPoint> argmax;  // lexicographic; empty iff w empty
  std::optional<double> mu_star;  // empty iff w empty
  long model_checks = 0;
};

/// Loaded study: elaborated model, parsed query, per-point memoization and
/// a restricted-model cache shared across horizon-only point changes.
/// Point evaluations are pure; concurrent evaluation of distinct points is
/// safe and the memo table tolerates concurrent insertion.
class Study {
 public:
  explicit Study(StudyConfig cfg);

  const StudyConfig& config() const { return cfg_; }
  const Mdp& model() const { return mdp_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Restriction, query solve and membership evaluation for one point,
  /// memoized. Errors are tagged with the offending point.
  EvalRecord evaluate_point(const SpecPoint& point);

  /// Every lattice point in lexicographic order; dispatches points across
  /// threads, output independent of scheduling.
  std::vector<EvalRecord> evaluate_all();

  ExplorationResult run_frontier();

  /// Records of the points evaluated so far, in lexicographic order.
  std::vector<EvalRecord> evaluated_records();

  long model_checks() const { return checks_.load(); }

 private:
  std::shared_ptr<const Mdp> restricted_for(const SpecPoint& point,
                                            SpecPoint* guard_key_out);
  EvalRecord compute_point(const SpecPoint& point);

  StudyConfig cfg_;
  Mdp mdp_;
  Formula base_;
  std::vector<std::string> warnings_;

  std::mutex memo_mutex_;
  std::map<SpecPoint, EvalRecord> memo_;
  std::mutex cache_mutex_;
  std::map<std::vector<int>, std::shared_ptr<const Mdp>> restricted_cache_;
  std::atomic<long> checks_{0};
};

/// One record per lattice point, lexicographic order.
std::vector<EvalRecord> evaluate_all(const StudyConfig& cfg);

/// W = {f : p_upper(f) >= rho}, the members of W attaining the maximum
/// membership (all ties), and that maximum. Empty W yields empty argmax
/// and no mu_star.
ExplorationResult optimal_specs(const std::vector<EvalRecord>& records,
                                double rho);

/// Equivalent result to evaluate_all + optimal_specs, found by locating the
/// strongest members of W: per-chain threshold crossings via binary search,
/// bounded by previously found crossings of stronger neighbor tuples.
/// model_checks reports how many query solves were needed.
ExplorationResult frontier_search(const StudyConfig& cfg);

/// Frontier core over an abstract monotone p_upper table; exposed so the
/// search can be validated against synthetic lattices.
struct FrontierResult {
  std::vector<SpecPoint> minimal_w;  // antichain of strongest W members
  long evaluations = 0;
};
FrontierResult find_w_frontier(
    const SpecLattice& lattice,
    const std::function<double(const SpecPoint&)>& p_upper, double rho);

/// Up-closure of an antichain toward weakness, in lexicographic order.
std::vector<SpecPoint> up_closure(const SpecLattice& lattice,
                                  const std::vector<SpecPoint>& minimal);

enum class ReportFormat { Csv, Dot };

/// csv: header `point,p_upper,p_lower,mu_1..mu_m,mu,in_w,is_argmax`, one
/// row per record, probabilities at full precision. dot: Hasse diagram
/// with W red, argmax blue, 4-decimal annotations.
std::string report(const std::vector<EvalRecord>& records,
                   const std::vector<SpecPoint>& w,
                   const std::vector<SpecPoint>& argmax, ReportFormat format,
                   const SpecLattice& lattice);

}  // namespace flexverif
