#pragma once

// The soundness harness: differential testing of the analyzer against the
// exhaustive concrete oracle, a reusable law battery for abstract-domain
// instances, and fault-injection checks that prove the harness itself can
// catch documented unsoundness bugs.

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "absint/analyzer.hpp"
#include "absint/concrete_semantics.hpp"
#include "absint/imp_gen.hpp"

namespace absint {

// ---------------------------------------------------------------------------
// Carrier enumeration

inline void require_enumerable(Nat count, Nat limit) {
  if (count > limit) throw StateBudgetError(count, limit);
}

/// Every interval of the width: Bot plus all ordered bound pairs.
inline std::vector<Itv> enumerate_intervals(Width w) {
  require_enumerable(w.value_count() * w.value_count(), Nat(1) << 24);
  std::vector<Itv> out;
  out.push_back(Itv::bottom());
  for (std::int64_t lo = w.min_value(); lo <= w.max_value(); ++lo)
    for (std::int64_t up = lo; up <= w.max_value(); ++up)
      out.push_back(Itv::val(IntM(lo, w), IntM(up, w)));
  return out;
}

/// Every machine integer of the width (small widths only).
inline std::vector<IntM> enumerate_values(Width w) {
  require_enumerable(w.value_count(), Nat(1) << 24);
  std::vector<IntM> out;
  for (std::int64_t v = w.min_value();; ++v) {
    out.push_back(IntM(v, w));
    if (v == w.max_value()) break;
  }
  return out;
}

/// Every concrete memory over nvars variables of the width.
inline std::vector<ConcreteMem> enumerate_concrete_memories(Width w, std::size_t nvars) {
  MemSet space(w, nvars);
  std::vector<ConcreteMem> out;
  out.reserve(space.state_count());
  for (std::size_t i = 0; i < space.state_count(); ++i) out.push_back(space.decode(i));
  return out;
}

/// Every canonical abstract memory: Bot plus all maps of non-empty entries.
inline std::vector<AMem<Itv>> enumerate_memories(const IntervalDomain& num, std::size_t nvars) {
  std::vector<Itv> entries;
  for (const Itv& i : enumerate_intervals(num.width()))
    if (!i.is_bottom()) entries.push_back(i);
  const Nat limit = Nat(1) << 24;
  Nat combinations = 1;
  for (std::size_t v = 0; v < nvars; ++v) {
    if (combinations > limit / entries.size()) throw StateBudgetError(limit + 1, limit);
    combinations *= entries.size();
  }
  std::vector<AMem<Itv>> out;
  out.push_back(AMem<Itv>::bottom());
  std::vector<std::size_t> pick(nvars, 0);
  while (true) {
    std::vector<Itv> map;
    map.reserve(nvars);
    for (std::size_t p : pick) map.push_back(entries[p]);
    out.push_back(AMem<Itv>::from_entries(std::move(map)));
    std::size_t v = 0;
    for (; v < nvars; ++v) {
      if (++pick[v] < entries.size()) break;
      pick[v] = 0;
    }
    if (v == nvars) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Law battery

struct LawResult {
  std::string law;
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  std::string first_failure;
};

struct LawReport {
  std::vector<LawResult> laws;

  bool all_passed() const {
    for (const LawResult& l : laws)
      if (l.failures) return false;
    return true;
  }

  std::string summary() const {
    std::string out;
    for (const LawResult& l : laws) {
      out += (l.failures ? "FAIL " : "pass ") + l.law + " (" + std::to_string(l.checked) +
             " checks";
      if (l.failures)
        out += ", " + std::to_string(l.failures) + " failures, first: " + l.first_failure;
      out += ")\n";
    }
    return out;
  }
};

namespace detail {

class LawRun {
public:
  explicit LawRun(std::string name) { result_.law = std::move(name); }

  template <typename FailDesc>
  void check(bool ok, FailDesc&& describe) {
    ++result_.checked;
    if (!ok) {
      if (result_.failures == 0) result_.first_failure = describe();
      ++result_.failures;
    }
  }

  LawResult take() { return std::move(result_); }

private:
  LawResult result_;
};

}  // namespace detail

/// Run every lattice/abstract-domain law against one instance over the given
/// carrier, and (for numeric domains) the forward/backward soundness laws
/// against the concrete operations. Exhaustive in the carrier except for
/// backward triples, which are sampled with the given seed.
template <AbstractDomain D>
LawReport run_battery(const D& dom, const std::vector<typename D::Value>& carrier,
                      const std::vector<typename D::Concrete>& concretes,
                      std::uint64_t seed = 1, std::size_t backward_triples = 10000) {
  using Value = typename D::Value;
  LawReport report;
  const Measure<Value> measure = dom.measure();

  auto describe = [&](const Value& v) { return v.str(); };
  auto describe_pair = [&](const Value& a, const Value& b) {
    return describe(a) + ", " + describe(b);
  };

  std::vector<std::pair<std::size_t, std::size_t>> related;
  for (std::size_t i = 0; i < carrier.size(); ++i)
    for (std::size_t j = 0; j < carrier.size(); ++j)
      if (dom.leq(carrier[i], carrier[j])) related.emplace_back(i, j);

  {
    detail::LawRun law("order reflexive");
    for (const Value& x : carrier)
      law.check(dom.leq(x, x), [&] { return describe(x); });
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("order transitive");
    for (auto [i, j] : related)
      for (const Value& z : carrier) {
        if (!dom.leq(carrier[j], z)) continue;
        law.check(dom.leq(carrier[i], z),
                  [&] { return describe_pair(carrier[i], carrier[j]) + ", " + describe(z); });
      }
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("join is an upper bound");
    for (const Value& x : carrier)
      for (const Value& y : carrier) {
        const Value j = dom.join(x, y);
        law.check(dom.leq(x, j) && dom.leq(y, j), [&] { return describe_pair(x, y); });
      }
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("meet is a lower bound");
    for (const Value& x : carrier)
      for (const Value& y : carrier) {
        const Value m = dom.meet(x, y);
        law.check(dom.leq(m, x) && dom.leq(m, y), [&] { return describe_pair(x, y); });
      }
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("bottom is least, top is greatest");
    for (const Value& x : carrier)
      law.check(dom.leq(dom.bottom(), x) && dom.leq(x, dom.top()),
                [&] { return describe(x); });
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("widen is an upper bound");
    for (const Value& x : carrier)
      for (const Value& y : carrier) {
        const Value w = dom.widen(x, y);
        law.check(dom.leq(x, w) && dom.leq(y, w), [&] { return describe_pair(x, y); });
      }
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("concretization is monotone");
    for (auto [i, j] : related)
      for (const auto& c : concretes) {
        if (!dom.contains(carrier[i], c)) continue;
        law.check(dom.contains(carrier[j], c),
                  [&] { return describe_pair(carrier[i], carrier[j]); });
      }
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("meet over-approximates intersection");
    for (const Value& x : carrier)
      for (const Value& y : carrier) {
        const Value m = dom.meet(x, y);
        for (const auto& c : concretes) {
          if (!dom.contains(x, c) || !dom.contains(y, c)) continue;
          law.check(dom.contains(m, c), [&] { return describe_pair(x, y); });
        }
      }
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("join over-approximates union");
    for (const Value& x : carrier)
      for (const Value& y : carrier) {
        const Value j = dom.join(x, y);
        for (const auto& c : concretes) {
          if (!dom.contains(x, c) && !dom.contains(y, c)) continue;
          law.check(dom.contains(j, c), [&] { return describe_pair(x, y); });
        }
      }
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("bottom concretizes to nothing, top to everything");
    for (const auto& c : concretes)
      law.check(!dom.contains(dom.bottom(), c) && dom.contains(dom.top(), c),
                [&] { return std::string("concrete value"); });
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("measure bounded by max");
    for (const Value& x : carrier)
      law.check(measure.f(x) < measure.max, [&] { return describe(x); });
    report.laws.push_back(law.take());
  }
  {
    detail::LawRun law("measure strictly decreasing on related distinct pairs");
    for (auto [i, j] : related) {
      if (carrier[i] == carrier[j]) continue;
      law.check(measure.f(carrier[i]) < measure.f(carrier[j]),
                [&] { return describe_pair(carrier[i], carrier[j]); });
    }
    report.laws.push_back(law.take());
  }

  if constexpr (requires(const Value& v) { dom.canonical(v); }) {
    detail::LawRun law("meet/join/widen keep memories canonical");
    for (const Value& x : carrier)
      for (const Value& y : carrier)
        law.check(dom.canonical(dom.meet(x, y)) && dom.canonical(dom.join(x, y)) &&
                      dom.canonical(dom.widen(x, y)),
                  [&] { return describe_pair(x, y); });
    report.laws.push_back(law.take());
  }

  if constexpr (NumDomain<D>) {
    {
      detail::LawRun law("constant abstraction contains its value");
      for (IntM c : concretes)
        law.check(dom.contains(dom.constant(c), c),
                  [&] { return std::to_string(c.value()); });
      report.laws.push_back(law.take());
    }
    {
      detail::LawRun law("positive/negative abstractions cover their signs");
      for (IntM c : concretes) {
        if (c.value() > 0)
          law.check(dom.contains(dom.positive(), c), [&] { return std::to_string(c.value()); });
        if (c.value() < 0)
          law.check(dom.contains(dom.negative(), c), [&] { return std::to_string(c.value()); });
      }
      report.laws.push_back(law.take());
    }
    {
      detail::LawRun law("forward operators are sound");
      for (BinOpKind op : all_binops)
        for (const Value& x : carrier)
          for (const Value& y : carrier) {
            const Value r = dom.forward(op, x, y);
            for (IntM a : concretes) {
              if (!dom.contains(x, a)) continue;
              for (IntM b : concretes) {
                if (!dom.contains(y, b)) continue;
                law.check(dom.contains(r, concrete_binop(op, a, b)), [&] {
                  return std::string(binop_symbol(op)) + " on " + describe_pair(x, y);
                });
              }
            }
          }
      report.laws.push_back(law.take());
    }
    {
      detail::LawRun sound("backward operators are sound");
      detail::LawRun refines("backward operators refine their inputs");
      std::mt19937_64 rng(seed);
      auto pick = [&]() -> const Value& { return carrier[rng() % carrier.size()]; };
      for (std::size_t t = 0; t < backward_triples; ++t) {
        const Value& x = pick();
        const Value& y = pick();
        const Value& r = pick();
        for (BinOpKind op : all_binops) {
          auto [x2, y2] = dom.backward(op, x, y, r);
          refines.check(dom.leq(x2, x) && dom.leq(y2, y), [&] {
            return std::string(binop_symbol(op)) + " on " + describe_pair(x, y) + ", " +
                   describe(r);
          });
          for (IntM a : concretes) {
            if (!dom.contains(x, a)) continue;
            for (IntM b : concretes) {
              if (!dom.contains(y, b) || !dom.contains(r, concrete_binop(op, a, b))) continue;
              sound.check(dom.contains(x2, a) && dom.contains(y2, b), [&] {
                return std::string(binop_symbol(op)) + " on " + describe_pair(x, y) + ", " +
                       describe(r) + " at (" + std::to_string(a.value()) + ", " +
                       std::to_string(b.value()) + ")";
              });
            }
          }
        }
      }
      report.laws.push_back(sound.take());
      report.laws.push_back(refines.take());
    }
  }

  return report;
}

/// The packaged batteries: intervals at the given width, memories at width 3
/// with two variables. Mutations are passed through so the harness can
/// validate itself.
inline LawReport run_law_batteries(Width interval_width, Mutations mut = {},
                                   std::uint64_t seed = 1, std::size_t backward_triples = 10000) {
  LawReport report;
  {
    IntervalDomain num(interval_width, Thresholds::standard(interval_width), mut);
    LawReport r = run_battery(num, enumerate_intervals(interval_width),
                              enumerate_values(interval_width), seed, backward_triples);
    for (LawResult& l : r.laws) {
      l.law = "interval: " + l.law;
      report.laws.push_back(std::move(l));
    }
  }
  {
    const Width mem_width(3);
    const std::size_t mem_vars = 2;
    IntervalDomain mem_num(mem_width, Thresholds::standard(mem_width), mut);
    MemoryDomain<IntervalDomain> mem(mem_num, mem_vars, mut);
    LawReport r = run_battery(mem, enumerate_memories(mem_num, mem_vars),
                              enumerate_concrete_memories(mem_width, mem_vars));
    for (LawResult& l : r.laws) {
      l.law = "memory: " + l.law;
      report.laws.push_back(std::move(l));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Differential soundness check

struct Witness {
  ConcreteMem initial;
  ConcreteMem final_memory;
  std::optional<VarIndex> variable;
  std::optional<IntM> value;
  Itv abstract_entry = Itv::bottom();
};

struct Verdict {
  Program program;
  enum class Status { Sound, Violation } status = Status::Sound;
  std::optional<Witness> witness;
  AnalysisStats stats;

  bool sound() const { return status == Status::Sound; }
};

struct CheckConfig {
  Nat budget = default_state_budget;
  std::optional<Thresholds> thresholds;
  Mutations mutations;
};

namespace detail {

inline Witness make_witness(const Program& p, const ConcreteMem& final_memory,
                            const AMem<Itv>& result, const IntervalDomain& num) {
  Witness w;
  w.final_memory = final_memory;
  if (!result.is_bottom()) {
    for (std::size_t v = 0; v < p.vars.size(); ++v) {
      if (!num.contains(result.get(VarIndex(v)), final_memory.values[v])) {
        w.variable = VarIndex(v);
        w.value = final_memory.values[v];
        w.abstract_entry = result.get(VarIndex(v));
        break;
      }
    }
  } else if (!p.vars.empty()) {
    // The whole memory was refuted; any variable witnesses that.
    w.variable = 0;
    w.value = final_memory.values[0];
    w.abstract_entry = Itv::bottom();
  }
  return w;
}

/// One member of `candidates` whose image contains the escaping memory.
inline ConcreteMem find_initial(const Stmt& body, const MemSet& candidates,
                                const ConcreteMem& final_memory) {
  std::optional<ConcreteMem> found;
  candidates.for_each_index([&](std::size_t i) {
    if (found) return;
    MemSet single(candidates.width(), candidates.nvars());
    single.add_index(i);
    if (post_image(body, single).contains(final_memory)) found = candidates.decode(i);
  });
  return found ? *found : final_memory;
}

}  // namespace detail

/// Compare the abstract result (from the all-top memory) against the exact
/// reachable set from every initial memory; report the first escapee.
inline Verdict check_soundness(const Program& p, const CheckConfig& cfg = {}) {
  Verdict verdict;
  verdict.program = p;
  const std::size_t nvars = p.vars.size();
  const MemSet all = MemSet::all(p.width, nvars, cfg.budget);
  const MemSet reachable = post_image(*p.body, all);

  AnalysisConfig acfg;
  acfg.thresholds = cfg.thresholds;
  acfg.mutations = cfg.mutations;
  const AnalysisReport report = analyze(p, acfg);
  verdict.stats = report.stats;

  IntervalDomain num(p.width, report.thresholds, cfg.mutations);
  MemoryDomain<IntervalDomain> dom(num, nvars, cfg.mutations);

  std::optional<std::size_t> escapee;
  reachable.for_each_index([&](std::size_t idx) {
    if (escapee) return;
    if (!dom.contains(report.final_memory, reachable.decode(idx))) escapee = idx;
  });

  if (escapee) {
    verdict.status = Verdict::Status::Violation;
    Witness w = detail::make_witness(p, reachable.decode(*escapee), report.final_memory, num);
    w.initial = detail::find_initial(*p.body, all, w.final_memory);
    verdict.witness = std::move(w);
  }
  return verdict;
}

/// Debugging variant: exact semantics from a single initial memory, still
/// compared against the abstract result from top.
inline Verdict check_soundness_from(const Program& p, const ConcreteMem& initial,
                                    const CheckConfig& cfg = {}) {
  Verdict verdict;
  verdict.program = p;
  const std::size_t nvars = p.vars.size();
  if (initial.values.size() != nvars)
    throw std::invalid_argument("check_soundness_from: initial memory has " +
                                std::to_string(initial.values.size()) + " values, program has " +
                                std::to_string(nvars) + " variables");
  MemSet start(p.width, nvars, cfg.budget);
  start.add(initial);
  const MemSet reachable = post_image(*p.body, start);

  AnalysisConfig acfg;
  acfg.thresholds = cfg.thresholds;
  acfg.mutations = cfg.mutations;
  const AnalysisReport report = analyze(p, acfg);
  verdict.stats = report.stats;

  IntervalDomain num(p.width, report.thresholds, cfg.mutations);
  MemoryDomain<IntervalDomain> dom(num, nvars, cfg.mutations);

  std::optional<std::size_t> escapee;
  reachable.for_each_index([&](std::size_t idx) {
    if (escapee) return;
    if (!dom.contains(report.final_memory, reachable.decode(idx))) escapee = idx;
  });
  if (escapee) {
    verdict.status = Verdict::Status::Violation;
    Witness w = detail::make_witness(p, reachable.decode(*escapee), report.final_memory, num);
    w.initial = initial;
    verdict.witness = std::move(w);
  }
  return verdict;
}

/// Check many programs, optionally fanned out across threads. Results are
/// ordered by program index regardless of scheduling.
inline std::vector<Verdict> check_many(const std::vector<Program>& programs,
                                       const CheckConfig& cfg = {}, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, programs.size() ? unsigned(programs.size()) : 1u);
  std::vector<Verdict> verdicts(programs.size(), Verdict{});
  if (programs.empty()) return verdicts;

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= programs.size()) return;
      try {
        verdicts[i] = check_soundness(programs[i], cfg);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return verdicts;
}

// ---------------------------------------------------------------------------
// Harness self-validation by fault injection

struct MutationOutcome {
  std::string name;
  bool detected = false;
  std::string detected_by;
};

/// Inject each documented unsoundness and confirm that the batteries or the
/// differential check catch it. A healthy harness detects all five.
inline std::vector<MutationOutcome> run_mutation_checks(std::uint64_t seed = 7,
                                                        std::size_t max_programs = 1000) {
  std::vector<std::pair<std::string, Mutations>> mutants;
  {
    Mutations m;
    m.widen_returns_meet = true;
    mutants.emplace_back("widen returns meet", m);
  }
  {
    Mutations m;
    m.skip_bottom_reduction = true;
    mutants.emplace_back("memory meet skips bottom reduction", m);
  }
  {
    Mutations m;
    m.backward_lt_skips_increment_guard = true;
    mutants.emplace_back("backward < skips the incrementable guard", m);
  }
  {
    Mutations m;
    m.negate_skips_min_guard = true;
    mutants.emplace_back("interval negation skips the minimum guard", m);
  }
  {
    Mutations m;
    m.assume_skips_negative_branch = true;
    mutants.emplace_back("assume drops the strictly-negative branch", m);
  }

  std::vector<MutationOutcome> outcomes;
  for (auto& [name, mut] : mutants) {
    MutationOutcome outcome;
    outcome.name = name;
    try {
      LawReport laws = run_law_batteries(Width(4), mut, seed);
      for (const LawResult& l : laws.laws) {
        if (l.failures) {
          outcome.detected = true;
          outcome.detected_by = "law battery: " + l.law;
          break;
        }
      }
    } catch (const FixpointError& e) {
      outcome.detected = true;
      outcome.detected_by = std::string("fixpoint assertion: ") + e.what();
    }
    if (!outcome.detected) {
      CheckConfig cfg;
      cfg.mutations = mut;
      for (std::size_t i = 0; i < max_programs && !outcome.detected; ++i) {
        Program prog = generate_program(seed + i, 12, 3, Width(4));
        try {
          if (!check_soundness(prog, cfg).sound()) {
            outcome.detected = true;
            outcome.detected_by = "differential check: program " + std::to_string(i);
          }
        } catch (const FixpointError& e) {
          outcome.detected = true;
          outcome.detected_by =
              "fixpoint assertion during program " + std::to_string(i) + ": " + e.what();
        }
      }
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

}  // namespace absint
