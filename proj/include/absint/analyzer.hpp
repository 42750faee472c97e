#pragma once

// Abstract interpretation of statements. Straight-line constructs map onto
// the memory domain's operations; loops are solved by a widening iteration
// up to a post-fixpoint, which is then a sound invariant for any number of
// body executions.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absint/abstract_memory.hpp"
#include "absint/domain_core.hpp"
#include "absint/imp_ast.hpp"
#include "absint/interval_domain.hpp"

namespace absint {

static_assert(MemDomain<MemoryDomain<IntervalDomain>>);

struct AnalysisStats {
  std::uint64_t loop_widening_steps = 0;
  std::uint64_t backward_prefixpoint_steps = 0;
};

/// Abstract postcondition of a statement from an abstract memory.
template <MemDomain M>
typename M::Value abstract_post(const M& dom, const Stmt& s, typename M::Value m,
                                AnalysisStats* stats = nullptr) {
  using Value = typename M::Value;
  if (dom.leq(m, dom.bottom())) return dom.bottom();
  return std::visit(
      overloaded{
          [&](const AssignStmt& x) { return dom.assign(m, x.var, *x.expr); },
          [&](const AssumeStmt& x) { return dom.assume(m, *x.expr); },
          [&](const SeqStmt& x) {
            return abstract_post(dom, *x.second, abstract_post(dom, *x.first, std::move(m), stats),
                                 stats);
          },
          [&](const ChoiceStmt& x) {
            return dom.join(abstract_post(dom, *x.left, m, stats),
                            abstract_post(dom, *x.right, m, stats));
          },
          [&](const LoopStmt& x) {
            FixpointStats fp;
            Value r = postfixpoint(
                [&](const Value& a, const Value& b) { return dom.leq(a, b); }, dom.measure(),
                [&](const Value& acc) {
                  return dom.widen(acc, abstract_post(dom, *x.body, acc, stats));
                },
                std::move(m), &fp);
            if (stats) stats->loop_widening_steps += fp.steps;
            return r;
          },
      },
      s.node);
}

struct AnalysisConfig {
  std::optional<Thresholds> thresholds;
  Mutations mutations;
  /// Starting intervals for selected variables; everything else is top.
  std::vector<std::pair<std::string, Itv>> initial;
};

struct AnalysisReport {
  std::vector<std::string> vars;
  AMem<Itv> final_memory = AMem<Itv>::bottom();
  AnalysisStats stats;
  Width width = Width(64);
  Thresholds thresholds;

  /// One line per variable; a Bot memory marks every variable unreachable.
  std::string to_text() const {
    std::string out;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (final_memory.is_bottom())
        out += vars[v] + " = BOT-memory unreachable\n";
      else
        out += vars[v] + " ∈ " + final_memory.get(VarIndex(v)).str() + "\n";
    }
    return out;
  }
};

/// Run the interval analysis of a whole program from an initial abstract
/// memory (all-top unless configured otherwise).
inline AnalysisReport analyze(const Program& p, const AnalysisConfig& cfg = {}) {
  const Thresholds thresholds =
      cfg.thresholds ? *cfg.thresholds : Thresholds::standard(p.width);
  IntervalDomain num(p.width, thresholds, cfg.mutations);
  MemoryDomain<IntervalDomain> dom(num, p.vars.size(), cfg.mutations);

  AMem<Itv> initial = dom.top();
  for (const auto& [name, itv] : cfg.initial) {
    bool found = false;
    for (std::size_t v = 0; v < p.vars.size(); ++v) {
      if (p.vars[v] == name) {
        initial = dom.update(VarIndex(v), itv, initial);
        found = true;
      }
    }
    if (!found)
      throw std::invalid_argument("initial interval names unknown variable '" + name + "'");
  }
  if (!dom.canonical(initial)) initial = dom.bottom();

  AnalysisReport report;
  report.vars = p.vars;
  report.width = p.width;
  report.thresholds = thresholds;
  report.final_memory = abstract_post(dom, *p.body, std::move(initial), &report.stats);
  report.stats.backward_prefixpoint_steps = dom.counters().backward_steps;
  return report;
}

}  // namespace absint
