#include "flexverif/explorer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

namespace flexverif {

namespace {

double start_value(const Mdp& restricted, const ProbVector& v,
                   const StartSpec& start) {
  if (start.kind == StartSpec::Kind::Initial)
    return v.values[restricted.initial];
  int prop = restricted.prop_index(start.label);
  if (prop < 0)
    throw UnknownLabel("unknown start label \"" + start.label + "\"");
  double best = 2.0;
  for (int s = 0; s < restricted.num_states; ++s)
    if (restricted.state_has_prop(s, prop))
      best = std::min(best, v.values[s]);
  if (best > 1.0)
    throw Error(fmt::format(
        "no reachable state carries start label \"{}\" after restriction",
        start.label));
  return best;
}

}  // namespace

Study::Study(StudyConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.lattice.dimensions.empty())
    throw ConfigError("study needs at least one design dimension");
  if (cfg_.requirements.empty())
    throw ConfigError("study needs at least one vague requirement");
  if (cfg_.rho < 0.0 || cfg_.rho > 1.0)
    throw ConfigError(fmt::format("rho = {} outside [0,1]", cfg_.rho));

  if (cfg_.model_builder) {
    mdp_ = cfg_.model_builder();
  } else {
    mdp_ = model::load_model_file(cfg_.model);
  }
  if (!cfg_.action_attrs.empty())
    attach_action_attributes(mdp_, cfg_.action_attrs);

  base_ = parse_query(cfg_.query);

  // Def. 4 normalization: sup over the attainable feature domain must be 1.
  // Asymptotic shapes reaching at least 0.99 only earn a warning.
  for (const auto& req : cfg_.requirements) {
    std::vector<double> domain;
    if (req.feature_source.rfind("attr:", 0) == 0) {
      auto it = mdp_.action_attrs.find(req.feature_source.substr(5));
      if (it == mdp_.action_attrs.end())
        throw ConfigError(fmt::format(
            "requirement '{}' reads attribute '{}' the model does not define",
            req.name, req.feature_source.substr(5)));
      domain = it->second;
    } else {
      bool found = false;
      for (const auto& dim : cfg_.lattice.dimensions) {
        if (dim.name == req.feature_source) {
          for (size_t j = 0; j < dim.values.size(); ++j)
            domain.push_back(dim.feature_at(static_cast<int>(j)));
          found = true;
          break;
        }
      }
      if (!found)
        throw ConfigError(fmt::format(
            "requirement '{}' references unknown dimension '{}'", req.name,
            req.feature_source));
    }
    if (!check_normalized(req, domain)) {
      double sup = 0.0;
      for (double x : domain) sup = std::max(sup, req.fn(x));
      if (sup >= 0.99) {
        warnings_.push_back(fmt::format(
            "requirement '{}': membership supremum {} < 1 over the "
            "attainable domain (asymptotic shape tolerated)",
            req.name, sup));
      } else {
        throw ConfigError(fmt::format(
            "requirement '{}' is not normalized: supremum {} < 0.99",
            req.name, sup));
      }
    }
  }
}

std::shared_ptr<const Mdp> Study::restricted_for(const SpecPoint& point,
                                                 SpecPoint* guard_key_out) {
  // Horizon dimensions do not affect the restriction; key the cache on the
  // guard-dimension indices only.
  std::vector<int> key;
  for (size_t d = 0; d < cfg_.lattice.dimensions.size(); ++d)
    if (cfg_.lattice.dimensions[d].kind != DimensionKind::Horizon)
      key.push_back(point.indices[d]);
  if (guard_key_out) guard_key_out->indices = key;

  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = restricted_cache_.find(key);
    if (it != restricted_cache_.end()) return it->second;
  }
  Materialized m = materialize(point, cfg_.lattice);
  auto restricted = std::make_shared<const Mdp>(
      restrict(mdp_, m.predicate, cfg_.deadlock_mode));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = restricted_cache_.emplace(key, std::move(restricted));
  return it->second;
}

EvalRecord Study::compute_point(const SpecPoint& point) {
  Materialized m = materialize(point, cfg_.lattice);
  std::shared_ptr<const Mdp> restricted = restricted_for(point, nullptr);

  Formula f = base_;
  if (m.horizon) f.bound = m.horizon;

  SolveOptions opts;
  opts.tolerance = cfg_.tolerance;

  EvalRecord rec;
  rec.point = point;

  f.objective = Objective::Max;
  ProbVector upper = solve_until(*restricted, f, opts);
  checks_.fetch_add(1);
  rec.p_upper = start_value(*restricted, upper, cfg_.start);

  if (cfg_.compute_lower) {
    f.objective = Objective::Min;
    ProbVector lower = solve_until(*restricted, f, opts);
    checks_.fetch_add(1);
    rec.p_lower = start_value(*restricted, lower, cfg_.start);
  }

  for (const auto& req : cfg_.requirements)
    rec.mu_each.push_back(mu_spec(req, point, cfg_.lattice, cfg_.mu_mode,
                                  restricted.get()));
  rec.mu = conjoin(rec.mu_each, cfg_.tnorm);
  rec.in_w = rec.p_upper >= cfg_.rho;
  return rec;
}

EvalRecord Study::evaluate_point(const SpecPoint& point) {
  {
    std::lock_guard<std::mutex> lock(memo_mutex_);
    auto it = memo_.find(point);
    if (it != memo_.end()) return it->second;
  }
  EvalRecord rec;
  try {
    rec = compute_point(point);
  } catch (const NonConvergence& e) {
    throw NonConvergence(fmt::format("{}: {}", point_id(point), e.what()),
                         e.residual(), e.iterations());
  } catch (const DeadlockAfterRestriction& e) {
    throw DeadlockAfterRestriction(
        fmt::format("{}: {}", point_id(point), e.what()), e.states());
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", point_id(point), e.what()));
  }
  std::lock_guard<std::mutex> lock(memo_mutex_);
  memo_.emplace(point, rec);
  return rec;
}

std::vector<EvalRecord> Study::evaluate_all() {
  std::vector<SpecPoint> points = cfg_.lattice.all_points();
  std::vector<EvalRecord> records(points.size());

  int nthreads = cfg_.threads > 0
                     ? cfg_.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads,
                                       static_cast<int>(points.size())));

  if (nthreads == 1) {
    for (size_t i = 0; i < points.size(); ++i)
      records[i] = evaluate_point(points[i]);
    return records;
  }

  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= points.size()) break;
          records[i] = evaluate_point(points[i]);
        }
      } catch (...) {
        errors[t] = std::current_exception();
        next.store(points.size());  // stop the other workers
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

std::vector<EvalRecord> Study::evaluated_records() {
  std::lock_guard<std::mutex> lock(memo_mutex_);
  std::vector<EvalRecord> out;
  out.reserve(memo_.size());
  for (const auto& [point, rec] : memo_) out.push_back(rec);
  return out;
}

std::vector<EvalRecord> evaluate_all(const StudyConfig& cfg) {
  Study study(cfg);
  return study.evaluate_all();
}

ExplorationResult optimal_specs(const std::vector<EvalRecord>& records,
                                double rho) {
  ExplorationResult result;
  double best = -1.0;
  for (const auto& rec : records) {
    if (rec.p_upper < rho) continue;
    result.w.push_back(rec.point);
    best = std::max(best, rec.mu);
  }
  std::sort(result.w.begin(), result.w.end());
  if (result.w.empty()) return result;
  result.mu_star = best;
  for (const auto& rec : records)
    if (rec.p_upper >= rho && rec.mu == best) result.argmax.push_back(rec.point);
  std::sort(result.argmax.begin(), result.argmax.end());
  result.model_checks = static_cast<long>(records.size());
  return result;
}

FrontierResult find_w_frontier(
    const SpecLattice& lattice,
    const std::function<double(const SpecPoint&)>& p_upper, double rho) {
  FrontierResult result;
  const auto& dims = lattice.dimensions;
  if (dims.empty()) return result;

  std::map<std::vector<int>, double> memo;
  auto probe = [&](const std::vector<int>& indices) {
    auto it = memo.find(indices);
    if (it != memo.end()) return it->second;
    double p = p_upper(SpecPoint{indices});
    memo.emplace(indices, p);
    return p;
  };

  const int axis_len = static_cast<int>(dims[0].values.size());
  // Enumerate the remaining dimensions lexicographically; along each tuple,
  // binary-search the first axis index inside W. Crossings of stronger
  // neighbor tuples upper-bound the search (descent through the lattice).
  std::vector<int> rest_sizes;
  for (size_t d = 1; d < dims.size(); ++d)
    rest_sizes.push_back(static_cast<int>(dims[d].values.size()));

  std::map<std::vector<int>, std::optional<int>> crossing;
  std::vector<int> rest(rest_sizes.size(), 0);
  for (;;) {
    int hi = axis_len - 1;
    bool bounded = false;
    for (size_t j = 0; j < rest.size(); ++j) {
      if (rest[j] == 0) continue;
      std::vector<int> neighbor = rest;
      --neighbor[j];
      auto it = crossing.find(neighbor);
      if (it != crossing.end() && it->second) {
        hi = std::min(hi, *it->second);
        bounded = true;
      }
    }

    auto point_at = [&](int i0) {
      std::vector<int> indices{i0};
      indices.insert(indices.end(), rest.begin(), rest.end());
      return indices;
    };

    std::optional<int> cross;
    if (probe(point_at(hi)) >= rho) {
      int lo = 0;
      int known_true = hi;
      while (lo < known_true) {
        int mid = lo + (known_true - lo) / 2;
        if (probe(point_at(mid)) >= rho)
          known_true = mid;
        else
          lo = mid + 1;
      }
      cross = known_true;
    } else if (bounded && hi < axis_len - 1) {
      // Defensive re-scan: a neighbor bound promised membership at hi, so a
      // miss can only come from boundary-equal probabilities.
      for (int i0 = hi + 1; i0 < axis_len; ++i0)
        if (probe(point_at(i0)) >= rho) {
          cross = i0;
          break;
        }
    }
    crossing[rest] = cross;

    // next rest tuple
    int d = static_cast<int>(rest.size()) - 1;
    while (d >= 0) {
      if (++rest[d] < rest_sizes[d]) break;
      rest[d] = 0;
      --d;
    }
    if (d < 0 && !rest.empty()) break;
    if (rest.empty()) break;
  }

  // Candidates, minus the ones dominated by a strictly stronger candidate.
  std::vector<SpecPoint> candidates;
  for (const auto& [rest_idx, cross] : crossing) {
    if (!cross) continue;
    std::vector<int> indices{*cross};
    indices.insert(indices.end(), rest_idx.begin(), rest_idx.end());
    candidates.push_back(SpecPoint{indices});
  }
  for (const auto& c : candidates) {
    bool dominated = false;
    for (const auto& other : candidates) {
      if (other == c) continue;
      if (weaker_eq(c, other)) {  // c admits a superset; other is stronger
        dominated = true;
        break;
      }
    }
    if (!dominated) result.minimal_w.push_back(c);
  }
  std::sort(result.minimal_w.begin(), result.minimal_w.end());
  result.evaluations = static_cast<long>(memo.size());
  return result;
}

std::vector<SpecPoint> up_closure(const SpecLattice& lattice,
                                  const std::vector<SpecPoint>& minimal) {
  std::vector<SpecPoint> out;
  for (const SpecPoint& p : lattice.all_points()) {
    for (const SpecPoint& m : minimal) {
      if (weaker_eq(p, m)) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

ExplorationResult Study::run_frontier() {
  auto p_fn = [this](const SpecPoint& p) { return evaluate_point(p).p_upper; };
  FrontierResult fr = find_w_frontier(cfg_.lattice, p_fn, cfg_.rho);

  ExplorationResult result;
  result.w = up_closure(cfg_.lattice, fr.minimal_w);
  result.model_checks = model_checks();
  if (result.w.empty()) return result;

  // Memberships need no model checking; evaluate them across W directly.
  double best = -1.0;
  std::vector<double> mus;
  mus.reserve(result.w.size());
  for (const SpecPoint& p : result.w) {
    std::vector<double> each;
    const Mdp* restricted = nullptr;
    std::shared_ptr<const Mdp> keep_alive;
    if (cfg_.mu_mode == MuMode::Reachable) {
      keep_alive = restricted_for(p, nullptr);
      restricted = keep_alive.get();
    }
    for (const auto& req : cfg_.requirements)
      each.push_back(mu_spec(req, p, cfg_.lattice, cfg_.mu_mode, restricted));
    mus.push_back(conjoin(each, cfg_.tnorm));
    best = std::max(best, mus.back());
  }
  result.mu_star = best;
  for (size_t i = 0; i < result.w.size(); ++i)
    if (mus[i] == best) result.argmax.push_back(result.w[i]);
  return result;
}

ExplorationResult frontier_search(const StudyConfig& cfg) {
  Study study(cfg);
  return study.run_frontier();
}

std::string report(const std::vector<EvalRecord>& records,
                   const std::vector<SpecPoint>& w,
                   const std::vector<SpecPoint>& argmax, ReportFormat format,
                   const SpecLattice& lattice) {
  std::set<SpecPoint> w_set(w.begin(), w.end());
  std::set<SpecPoint> argmax_set(argmax.begin(), argmax.end());

  if (format == ReportFormat::Csv) {
    size_t m = records.empty() ? 0 : records[0].mu_each.size();
    std::string out = "point,p_upper,p_lower";
    for (size_t i = 1; i <= m; ++i) out += fmt::format(",mu_{}", i);
    out += ",mu,in_w,is_argmax\n";
    for (const auto& rec : records) {
      out += point_id(rec.point);
      out += fmt::format(",{}", rec.p_upper);
      out += rec.p_lower ? fmt::format(",{}", *rec.p_lower) : ",";
      for (double v : rec.mu_each) out += fmt::format(",{}", v);
      out += fmt::format(",{}", rec.mu);
      out += rec.in_w ? ",true" : ",false";
      out += argmax_set.count(rec.point) ? ",true\n" : ",false\n";
    }
    return out;
  }

  std::map<SpecPoint, NodeStyle> styles;
  for (const SpecPoint& p : w) styles[p].color = "red";
  for (const SpecPoint& p : argmax) styles[p].color = "blue";
  for (const auto& rec : records) {
    NodeStyle& style = styles[rec.point];
    style.annotation = fmt::format("P={:.4f}, mu={:.4f}", rec.p_upper, rec.mu);
  }
  return to_dot(lattice, styles);
}

}  // namespace flexverif
