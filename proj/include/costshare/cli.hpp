// Copyright 2026 The costshare Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommands of the costshare tool. Each returns the process exit code:
// 0 pass, 1 property or audit violation, 2 input error, 3 size guard.

#ifndef COSTSHARE_CLI_HPP
#define COSTSHARE_CLI_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "costshare/audit.hpp"
#include "costshare/io.hpp"
#include "costshare/mechanisms.hpp"
#include "costshare/model.hpp"
#include "costshare/potential.hpp"

namespace costshare::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSize = 3;

struct RunOptions {
  std::string instance;
  std::string mechanism = "potential";
  std::optional<std::string> tie_break;
  bool opt = false;
  std::optional<std::string> out;
};

struct CheckOptions {
  std::string instance;
  std::string property;
};

struct DemoOptions {
  std::string name;
  std::size_t players = 2;
  std::optional<double> epsilon;
  std::optional<std::string> out;
};

struct AuditOptions {
  std::optional<std::string> instance;
  std::string audit;
  std::string mechanism = "potential";
  std::optional<std::string> tie_break;
  std::optional<std::string> grid;
  std::uint64_t seed = 0;
  std::optional<std::string> h_levels;
  std::string objective = "potential";
  double scale = 1.0;
  std::optional<std::string> out;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::size_limit: return kExitSize;
    case ErrorKind::internal_consistency: return kExitViolation;
    default: return kExitInput;
  }
}

/// Runs `body`, mapping library errors to exit codes and messages on `err`.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "costshare: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "costshare: " << e.what() << '\n';
    return kExitInput;
  }
}

inline Json base_report(std::string_view command) {
  Json r;
  r["schema"] = std::string(kReportSchema);
  r["command"] = std::string(command);
  return r;
}

/// Appends the wall-clock field last, then writes atomically to `out` or
/// prints to `stdout_stream`.
inline void emit(Json report, Clock::time_point start,
                 const std::optional<std::string>& out, std::ostream& stdout_stream) {
  report["wall_clock_seconds"] =
      std::chrono::duration<double>(Clock::now() - start).count();
  const std::string doc = to_document(report);
  if (out) {
    write_file_atomic(*out, doc);
  } else {
    stdout_stream << doc;
  }
}

inline std::optional<TieBreak> parse_tie_break(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  if (*s == "canonical") return TieBreak::canonical_min;
  if (*s == "symmetric-prefix") return TieBreak::symmetric_prefix;
  throw Error(ErrorKind::invalid_argument, "unknown tie-break '" + *s + "'");
}

inline std::vector<double> parse_csv(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string part =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_argument,
                  std::string("cannot parse ") + what + " value '" + part + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// "scales=a,b;values=lo:hi:step;table=on|off;max=N;samples=N;coalition=K"
inline DeviationGrid parse_grid(const std::optional<std::string>& spec,
                                std::uint64_t seed) {
  DeviationGrid grid;
  grid.seed = seed;
  if (!spec) return grid;
  std::size_t start = 0;
  const std::string& s = *spec;
  while (start < s.size()) {
    std::size_t end = s.find(';', start);
    if (end == std::string::npos) end = s.size();
    const std::string field = s.substr(start, end - start);
    start = end + 1;
    if (field.empty()) continue;
    const std::size_t eq = field.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::invalid_argument, "grid field '" + field + "' lacks '='");
    }
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "scales") {
      grid.scales = parse_csv(value, "scale");
    } else if (key == "values") {
      std::string csv = value;
      std::replace(csv.begin(), csv.end(), ':', ',');
      const auto parts = parse_csv(csv, "grid");
      if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
        throw Error(ErrorKind::invalid_argument, "values must be lo:hi:step");
      }
      grid.value_lo = parts[0];
      grid.value_hi = parts[1];
      grid.value_step = parts[2];
    } else if (key == "table") {
      if (value != "on" && value != "off") {
        throw Error(ErrorKind::invalid_argument, "table must be on or off");
      }
      grid.tables = value == "on";
    } else if (key == "max") {
      grid.max_joint = parse_csv(value, "max")[0];
    } else if (key == "samples") {
      grid.samples = static_cast<std::size_t>(parse_csv(value, "samples")[0]);
    } else if (key == "coalition") {
      grid.max_coalition = static_cast<std::size_t>(parse_csv(value, "coalition")[0]);
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown grid field '" + key + "'");
    }
  }
  return grid;
}

inline Json payments_json(const std::vector<double>& p) { return Json(p); }

inline Json outcome_json(const ItemUniverse& u, const MechanismOutcome& o) {
  Json j;
  j["mechanism"] = o.mechanism;
  j["allocation"] = allocation_to_json(u, o.allocation);
  j["payments"] = payments_json(o.payments);
  j["payment_total"] = o.payment_total();
  j["cost_incurred"] = o.cost_incurred;
  j["objective_value"] = o.objective_value;
  j["h_of_alg"] = o.h_of_alg;
  return j;
}

inline Json table_json(const ItemUniverse& u, std::size_t player, const ValueTable& t) {
  Json j = Json::object();
  for (ItemMask s = 0; s < t.size(); ++s) {
    j[bundle_key(u, u.globalize(s, player))] = t[s];
  }
  return j;
}

/// Simple universe, scalar valuations, cost depending on |S| only.
struct FastForm {
  std::vector<double> levels;
  std::vector<double> values;
};

inline std::optional<FastForm> fast_form(const Instance& inst) {
  const ItemUniverse& u = inst.universe;
  if (!u.is_simple()) return std::nullopt;
  const std::size_t n = u.players();
  FastForm f;
  if (inst.cost.kind() == FunctionKind::epg) {
    f.levels.assign(n + 1, 1.0);
    f.levels[0] = 0.0;
  } else if (inst.cost.kind() == FunctionKind::symmetric) {
    f.levels = inst.cost.payload();
  } else {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < n; ++i) {
    f.values.push_back(inst.valuations[i].eval_local(1));
  }
  return f;
}

inline MechanismOutcome run_mechanism(const Instance& inst, const std::string& name,
                                      std::optional<TieBreak> tie) {
  if (name == "potential") {
    if (inst.universe.item_count() > kGenericLimitLog2) {
      if (tie == TieBreak::symmetric_prefix || !fast_form(inst)) {
        require_enumerable(inst.universe);
      }
      const auto f = *fast_form(inst);
      return ::costshare::detail::outcome_from_fast(
          inst.universe, run_potential_symmetric_fast(f.levels, f.values));
    }
    return run_potential(inst, tie);
  }
  if (tie && name != "vcg") {
    throw Error(ErrorKind::invalid_argument,
                "--tie-break applies to the potential and vcg mechanisms only");
  }
  if (name == "vcg") {
    require_enumerable(inst.universe);
    return make_vcg_baseline(inst, tie.value_or(TieBreak::canonical_min))(
        tabulate_valuations(inst));
  }
  if (name == "sequential-gsp") return run_sequential(inst, SequentialVariant::gsp_max_size);
  if (name == "sequential-wgsp") {
    return run_sequential(inst, SequentialVariant::wgsp_lexicographic);
  }
  throw Error(ErrorKind::invalid_argument, "unknown mechanism '" + name + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

inline int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto start = detail::Clock::now();
    const auto tie = detail::parse_tie_break(o.tie_break);
    const bool sequential = o.mechanism.rfind("sequential", 0) == 0;
    const Instance inst =
        load_instance(o.instance, sequential ? SizeGuard::per_player : SizeGuard::none);
    const ItemUniverse& u = inst.universe;
    const MechanismOutcome outcome = detail::run_mechanism(inst, o.mechanism, tie);
    const AuditReport metrics = evaluate_outcome(inst, outcome, false);

    Json r = detail::base_report("run");
    r["instance"] = o.instance;
    r["mechanism"] = o.mechanism;
    if (o.mechanism == "potential" || o.mechanism == "vcg") {
      const TieBreak resolved =
          tie.value_or(o.mechanism == "potential" && u.item_count() <= kGenericLimitLog2
                           ? default_tie_break(inst)
                           : TieBreak::canonical_min);
      r["tie_break"] = std::string(to_string(resolved));
    } else {
      r["tie_break"] = nullptr;
    }
    r["players"] = u.players();
    r["allocation"] = allocation_to_json(u, outcome.allocation);
    r["payments"] = outcome.payments;
    r["payment_total"] = outcome.payment_total();
    r["cost_incurred"] = outcome.cost_incurred;
    if (u.players() <= kMaxPlayersGeneric) {
      r["potential_of_alg"] = potential_value(inst.cost, u, outcome.allocation);
    } else if (o.mechanism == "potential") {
      r["potential_of_alg"] = outcome.h_of_alg;
    } else {
      r["potential_of_alg"] = nullptr;
    }
    r["objective_value"] = outcome.objective_value;
    r["h_of_alg"] = outcome.h_of_alg;
    r["social_cost"] = metrics.social_cost_alg;
    Json ratios;
    ratios["budget"] = metrics.budget.ratio;
    if (o.opt) {
      const AuditReport full = evaluate_outcome(inst, outcome, true);
      r["opt_social_cost"] = *full.social_cost_opt;
      r["opt_allocation"] = allocation_to_json(u, *full.opt_allocation);
      r["welfare_gap"] = *full.welfare_gap;
      ratios["social_cost"] = *full.social_cost_ratio;
    }
    r["ratios"] = std::move(ratios);
    Json checks;
    checks["ir_ok"] = metrics.ir_ok;
    checks["npt_ok"] = metrics.npt_ok;
    checks["cost_recovered"] = metrics.cost_recovered;
    checks["deficit"] = metrics.budget.deficit;
    r["checks"] = std::move(checks);
    if (!outcome.diagnostics.empty()) {
      Json constrained = Json::array();
      for (std::size_t i = 0; i < outcome.diagnostics.size(); ++i) {
        Json d;
        d["player"] = i + 1;
        d["allocation"] = allocation_to_json(u, outcome.diagnostics[i].constrained);
        d["objective"] = outcome.diagnostics[i].objective;
        constrained.push_back(std::move(d));
      }
      r["constrained"] = std::move(constrained);
    }
    r["seed"] = 0;
    detail::emit(std::move(r), start, o.out, out);
    return kExitPass;
  });
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

namespace detail {

inline int report_class(std::ostream& out, const ItemUniverse& u, std::string_view what,
                        const ClassVerdict& v) {
  if (v) {
    out << what << ": holds\n";
    return kExitPass;
  }
  const auto& w = *v.witness;
  out << what << ": fails; witness S={" << bundle_key(u, w.s) << "} T={"
      << bundle_key(u, w.t) << "} lhs=" << format_number(w.lhs)
      << " rhs=" << format_number(w.rhs) << '\n';
  return kExitViolation;
}

/// Class check of a valuation, with witness sets mapped to global indices.
inline ClassVerdict valuation_class(const Instance& inst, std::size_t i,
                                    FunctionClass cls) {
  return check_class(inst.valuations[i], cls);
}

}  // namespace detail

inline int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Instance inst = load_instance(o.instance);
    const ItemUniverse& u = inst.universe;
    const std::string& p = o.property;
    if (p == "submodular-cost") {
      return detail::report_class(out, u, p, check_class(inst.cost, FunctionClass::submodular));
    }
    if (p == "subadditive-cost") {
      return detail::report_class(out, u, p, check_class(inst.cost, FunctionClass::subadditive));
    }
    if (p == "supermodular-valuations" || p == "symmetric") {
      const FunctionClass cls = p == "symmetric" ? FunctionClass::symmetric
                                                 : FunctionClass::supermodular;
      for (std::size_t i = 0; i < u.players(); ++i) {
        const auto v = detail::valuation_class(inst, i, cls);
        if (!v) {
          return detail::report_class(out, u, p + " (valuation " + std::to_string(i + 1) + ")", v);
        }
      }
      if (p == "symmetric") {
        const auto c = check_class(inst.cost, FunctionClass::player_symmetric);
        if (!c) return detail::report_class(out, u, p + " (cost)", c);
      }
      out << p << ": holds\n";
      return kExitPass;
    }
    if (p == "potential-bounds") {
      const PotentialTable pot(inst.cost, u);
      const double hn = harmonic(u.players());
      const std::vector<double> c = inst.cost.tabulate();
      // Lower bound: C for XOS (submodular included), C/2 for subadditive.
      double lower_factor = 0.0;
      std::string lower = "none";
      if (inst.cost.kind() == FunctionKind::xos ||
          check_class(inst.cost, FunctionClass::submodular)) {
        lower_factor = 1.0;
        lower = "xos";
      } else if (u.item_count() <= kSubadditiveLimit &&
                 check_class(inst.cost, FunctionClass::subadditive)) {
        lower_factor = 0.5;
        lower = "subadditive";
      }
      for (ItemMask s = 0; s < c.size(); ++s) {
        const double value = pot(Allocation{s});
        const bool below = value < lower_factor * c[s] - kTolerance;
        const bool above = value > hn * c[s] + kTolerance;
        if (below || above) {
          out << p << ": fails at S={" << bundle_key(u, s) << "} P=" << format_number(value)
              << " C=" << format_number(c[s]) << " ("
              << (below ? "lower bound " + lower : std::string("upper bound H_n*C")) << ")\n";
          return kExitViolation;
        }
      }
      out << p << ": holds (lower bound: " << lower << ", upper bound: H_n*C)\n";
      return kExitPass;
    }
    if (p == "potential-identity") {
      if (u.item_count() + u.players() > 28) {
        throw Error(ErrorKind::size_limit, "identity sweep is limited to m + n <= 28");
      }
      const PotentialTable pot(inst.cost, u);
      const std::vector<double> c = inst.cost.tabulate();
      for (ItemMask s = 0; s < c.size(); ++s) {
        const Allocation a{s};
        const double closed = potential_value(inst.cost, u, a);
        double gradient = 0.0;
        for (std::size_t i = 0; i < u.players(); ++i) {
          gradient += pot(a) - pot(without_player(u, a, i));
        }
        if (std::abs(closed - pot(a)) > kTolerance ||
            std::abs(gradient - c[s]) > kTolerance) {
          out << p << ": fails at S={" << bundle_key(u, s)
              << "} closed=" << format_number(closed)
              << " recursive=" << format_number(pot(a))
              << " gradient_sum=" << format_number(gradient)
              << " C=" << format_number(c[s]) << '\n';
          return kExitViolation;
        }
      }
      out << p << ": holds\n";
      return kExitPass;
    }
    throw Error(ErrorKind::invalid_argument, "unknown property '" + p + "'");
  });
}

// ---------------------------------------------------------------------------
// demo
// ---------------------------------------------------------------------------

inline std::string_view to_string(MetricCheck c) {
  switch (c) {
    case MetricCheck::equal: return "equal";
    case MetricCheck::at_least: return "at_least";
    case MetricCheck::within: return "within";
  }
  return "equal";
}

inline int cmd_demo(const DemoOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto start = detail::Clock::now();
    const Counterexample cx = build_counterexample(o.name, o.players, o.epsilon);
    const DemoResult result = run_demo(cx);
    const ItemUniverse& u = cx.instance.universe;
    Json r = detail::base_report("demo");
    r["name"] = cx.name;
    r["players"] = cx.players;
    r["epsilon"] = cx.epsilon;
    r["mechanism"] = cx.mechanism;
    r["outcome"] = detail::outcome_json(u, result.outcome);
    if (result.deviation) {
      r["deviation"] = detail::outcome_json(u, *result.deviation);
    }
    Json metrics = Json::array();
    for (const auto& m : result.metrics) {
      Json j;
      j["name"] = m.expected.name;
      j["check"] = std::string(to_string(m.expected.check));
      j["expected"] = m.expected.value;
      if (m.expected.check == MetricCheck::within) j["upper"] = m.expected.upper;
      j["relative"] = m.expected.relative;
      j["measured"] = m.measured;
      j["matches"] = m.matches;
      metrics.push_back(std::move(j));
    }
    r["metrics"] = std::move(metrics);
    r["matches"] = result.matches();
    r["seed"] = 0;
    detail::emit(std::move(r), start, o.out, out);
    return result.matches() ? kExitPass : kExitViolation;
  });
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

namespace detail {

using ErasedMechanism = std::function<MechanismOutcome(const Profile&)>;

inline ErasedMechanism make_mechanism(const Instance& inst, const std::string& name,
                                      std::optional<TieBreak> tie) {
  if (tie && name != "potential" && name != "vcg") {
    throw Error(ErrorKind::invalid_argument,
                "--tie-break applies to the potential and vcg mechanisms only");
  }
  if (name == "potential") return make_potential_mechanism(inst, tie);
  if (name == "vcg") return make_vcg_baseline(inst, tie.value_or(TieBreak::canonical_min));
  if (name == "sequential-gsp") {
    return SequentialMechanism(inst, SequentialVariant::gsp_max_size);
  }
  if (name == "sequential-wgsp") {
    return SequentialMechanism(inst, SequentialVariant::wgsp_lexicographic);
  }
  if (name == "pay-your-bid") return PayYourBid(inst, ObjectiveSpec::potential(inst));
  throw Error(ErrorKind::invalid_argument, "unknown mechanism '" + name + "'");
}

inline Json grid_json(const DeviationGrid& g) {
  Json j;
  j["scales"] = g.scales;
  j["values"] = Json::array({g.value_lo, g.value_hi, g.value_step});
  j["table"] = g.tables;
  j["max"] = g.max_joint;
  j["samples"] = g.samples;
  j["coalition"] = g.max_coalition;
  return j;
}

inline Json witness_json(const ItemUniverse& u, const DeviationWitness& w) {
  Json j;
  Json coalition = Json::array();
  Json reports = Json::array();
  for (std::size_t k = 0; k < w.coalition.size(); ++k) {
    coalition.push_back(w.coalition[k] + 1);
    reports.push_back(table_json(u, w.coalition[k], w.reports[k]));
  }
  j["coalition"] = std::move(coalition);
  j["reports"] = std::move(reports);
  j["utility_before"] = w.before;
  j["utility_after"] = w.after;
  j["truthful"] = outcome_json(u, w.truthful);
  j["deviated"] = outcome_json(u, w.deviated);
  return j;
}

/// h levels for the marginal audit: explicit CSV, or the symmetric
/// potential of a simple instance whose cost depends on |S| only.
inline std::vector<double> marginal_levels(const AuditOptions& o) {
  if (o.h_levels) return parse_csv(*o.h_levels, "h-levels");
  if (!o.instance) {
    throw Error(ErrorKind::invalid_argument, "marginal audit needs --h-levels or --instance");
  }
  const Instance inst = load_instance(*o.instance);
  const ItemUniverse& u = inst.universe;
  if (!u.is_simple() || !check_class(inst.cost, FunctionClass::symmetric)) {
    throw Error(ErrorKind::invalid_argument,
                "default h-levels need a simple instance with a size-symmetric cost");
  }
  std::vector<double> c;
  for (std::size_t k = 0; k <= u.players(); ++k) c.push_back(inst.cost(low_bits(static_cast<unsigned>(k))));
  return symmetric_potential(c).levels;
}

}  // namespace detail

inline int cmd_audit(const AuditOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto start = detail::Clock::now();
    Json r = detail::base_report("audit");
    r["audit"] = o.audit;
    if (o.instance) r["instance"] = *o.instance;
    bool passed = true;

    if (o.audit == "marginal") {
      const auto levels = detail::marginal_levels(o);
      const MarginalVerdict v = symmetric_marginal_audit(levels);
      r["h_levels"] = levels;
      passed = v.passed;
      if (!v.passed) {
        Json w;
        w["size"] = *v.witness_size;
        w["increment"] = v.increment;
        w["required"] = 1.0 / static_cast<double>(*v.witness_size);
        r["witness"] = std::move(w);
      }
    } else {
      if (!o.instance) throw Error(ErrorKind::invalid_argument, "--instance is required");
      const Instance inst = load_instance(*o.instance);
      const ItemUniverse& u = inst.universe;
      const auto tie = detail::parse_tie_break(o.tie_break);

      if (o.audit == "sp" || o.audit == "wgsp" || o.audit == "gsp") {
        const DeviationGrid grid = detail::parse_grid(o.grid, o.seed);
        const auto mechanism = detail::make_mechanism(inst, o.mechanism, tie);
        const DeviationVerdict v =
            o.audit == "sp"
                ? test_strategyproof(inst, mechanism, grid)
                : test_group_deviation(inst, mechanism,
                                       o.audit == "wgsp" ? GroupNotion::wgsp : GroupNotion::gsp,
                                       grid);
        r["mechanism"] = o.mechanism;
        r["grid"] = detail::grid_json(grid);
        r["exhaustive_over_grid"] = v.exhaustive;
        r["profiles_tested"] = v.profiles_tested;
        passed = v.passed;
        if (v.witness) r["witness"] = detail::witness_json(u, *v.witness);
      } else if (o.audit == "bb-inequality") {
        if (o.mechanism != "potential") {
          throw Error(ErrorKind::invalid_argument, "bb-inequality audits the potential mechanism");
        }
        const MechanismOutcome outcome = run_potential(inst, tie);
        const BbInequality b = bb_inequality_audit(inst, outcome);
        r["mechanism"] = o.mechanism;
        r["outcome"] = detail::outcome_json(u, outcome);
        r["lhs"] = b.lhs;
        r["rhs"] = b.rhs;
        passed = b.holds;
      } else if (o.audit == "minimality") {
        if (o.objective != "potential" && o.objective != "cost") {
          throw Error(ErrorKind::invalid_argument, "objective must be potential or cost");
        }
        ObjectiveSpec h = o.objective == "potential" ? ObjectiveSpec::potential(inst)
                                                     : ObjectiveSpec::cost(inst);
        if (o.scale != 1.0) h = ObjectiveSpec::custom(u, h.scaled(o.scale).values);
        const MinimalityVerdict v = minimality_audit(h, inst.cost, u);
        r["objective"] = o.objective;
        r["scale"] = o.scale;
        passed = v.passed;
        if (v.violation) {
          const auto& w = *v.violation;
          Json j;
          j["allocation"] = allocation_to_json(u, w.allocation);
          j["h"] = w.h_value;
          j["potential"] = w.potential;
          j["item_value"] = w.item_value;
          j["outcome"] = detail::outcome_json(u, w.outcome);
          j["deficit"] = w.deficit;
          j["deficit_confirmed"] = w.deficit < -kTolerance;
          r["witness"] = std::move(j);
        }
      } else {
        throw Error(ErrorKind::invalid_argument, "unknown audit '" + o.audit + "'");
      }
    }
    r["passed"] = passed;
    r["seed"] = o.seed;
    detail::emit(std::move(r), start, o.out, out);
    return passed ? kExitPass : kExitViolation;
  });
}

}  // namespace costshare::cli

#endif  // COSTSHARE_CLI_HPP
