#pragma once

// Command-line entry point.
//
//   absint analyze <file> [--width N] [--thresholds T] [--format text|json]
//                         [--initial var=lo:hi ...]
//   absint check [<file> | --gen --count K --seed S] [--width N] ...
//   absint gen --count K --seed S [--size B] [--vars V] [--width N]
//   absint run <file> [--seed S] [--width N] [--fuel F] [--initial var=v ...]
//
// Exit codes: 0 success (check: sound), 1 soundness violation, 2 usage or
// parse errors, 3 state budget exceeded. ABSINT_WIDTH sets the default
// width. All output is deterministic given the flags.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "absint/analyzer.hpp"
#include "absint/difftest.hpp"
#include "absint/imp_gen.hpp"
#include "absint/imp_parse.hpp"

namespace absint {

namespace cli_detail {

using nlohmann::json;

inline json bound_json(std::int64_t bound, std::int64_t clip) {
  // Bounds sitting exactly on the width's extremes render as null: the
  // variable is unconstrained on that side.
  if (bound == clip) return nullptr;
  return bound;
}

inline json report_to_json(const AnalysisReport& report) {
  json vars = json::object();
  for (std::size_t v = 0; v < report.vars.size(); ++v) {
    if (report.final_memory.is_bottom()) {
      vars[report.vars[v]] = "bot";
    } else {
      const Itv& e = report.final_memory.get(VarIndex(v));
      if (e.is_bottom()) {
        vars[report.vars[v]] = "bot";
      } else {
        vars[report.vars[v]] = {
            {"low", bound_json(e.low(), report.width.min_value())},
            {"up", bound_json(e.up(), report.width.max_value())},
        };
      }
    }
  }
  return {
      {"vars", vars},
      {"stats",
       {{"loop_widening_steps", report.stats.loop_widening_steps},
        {"backward_prefixpoint_steps", report.stats.backward_prefixpoint_steps}}},
      {"config",
       {{"width", report.width.bits()}, {"thresholds", report.thresholds.values()}}},
  };
}

inline json memory_json(const Program& p, const ConcreteMem& m) {
  json out = json::object();
  for (std::size_t v = 0; v < p.vars.size(); ++v) out[p.vars[v]] = m.values[v].value();
  return out;
}

inline json verdict_to_json(const Verdict& v, std::size_t index) {
  json out = {
      {"index", index},
      {"width", v.program.width.bits()},
      {"status", v.sound() ? "sound" : "violation"},
      {"program", pretty(v.program)},
  };
  if (v.witness) {
    const Witness& w = *v.witness;
    json witness = {
        {"initial", memory_json(v.program, w.initial)},
        {"final", memory_json(v.program, w.final_memory)},
    };
    if (w.variable) {
      witness["variable"] = v.program.vars[*w.variable];
      witness["value"] = w.value->value();
    }
    witness["abstract"] = w.abstract_entry.str();
    out["witness"] = witness;
  }
  return out;
}

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::int64_t> parse_threshold_list(const std::string& text) {
  std::vector<std::int64_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stoll(item));
  }
  return values;
}

struct InitialInterval {
  std::string var;
  std::int64_t low;
  std::int64_t up;
};

inline InitialInterval parse_initial_interval(const std::string& text) {
  const auto eq = text.find('=');
  const auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos)
    throw std::invalid_argument("--initial expects var=low:up, got '" + text + "'");
  return {text.substr(0, eq), std::stoll(text.substr(eq + 1, colon - eq - 1)),
          std::stoll(text.substr(colon + 1))};
}

}  // namespace cli_detail

/// Run the CLI on explicit arguments (excluding the program name).
/// Returns the process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using cli_detail::json;

  CLI::App app{"Sound interval analyzer for the IMP language"};
  app.require_subcommand(1);

  int width_bits = 64;
  std::string thresholds_text;

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze a program file");
  std::string analyze_file;
  std::string format = "text";
  std::vector<std::string> initial_intervals;
  analyze_cmd->add_option("file", analyze_file, "program file")->required();
  analyze_cmd->add_option("--width", width_bits, "bit width (2..64)")
      ->envname("ABSINT_WIDTH");
  analyze_cmd->add_option("--thresholds", thresholds_text,
                          "comma-separated widening thresholds");
  analyze_cmd->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  analyze_cmd->add_option("--initial", initial_intervals,
                          "initial interval for a variable, var=low:up");

  // check
  auto* check_cmd = app.add_subcommand("check", "Differential soundness check");
  std::string check_file;
  bool use_gen = false;
  std::uint64_t seed = 7;
  std::size_t count = 100;
  int gen_size = 12;
  int gen_vars = 3;
  check_cmd->add_option("file", check_file, "program file");
  check_cmd->add_flag("--gen", use_gen, "check generated programs instead of a file");
  check_cmd->add_option("--count", count, "number of generated programs");
  check_cmd->add_option("--seed", seed, "generator seed");
  check_cmd->add_option("--size", gen_size, "generated statement budget");
  check_cmd->add_option("--vars", gen_vars, "generated variable count (1..8)");
  check_cmd->add_option("--width", width_bits, "bit width (2..64)")->envname("ABSINT_WIDTH");
  check_cmd->add_option("--thresholds", thresholds_text, "comma-separated widening thresholds");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Print generated programs");
  gen_cmd->add_option("--count", count, "number of programs");
  gen_cmd->add_option("--seed", seed, "generator seed");
  gen_cmd->add_option("--size", gen_size, "statement budget");
  gen_cmd->add_option("--vars", gen_vars, "variable count (1..8)");
  gen_cmd->add_option("--width", width_bits, "bit width (2..64)")->envname("ABSINT_WIDTH");

  // run
  auto* run_cmd = app.add_subcommand("run", "One randomized concrete execution");
  std::string run_file;
  std::uint64_t run_seed = 0;
  int fuel = 100000;
  int retries = 1000;
  std::vector<std::string> run_initial;
  run_cmd->add_option("file", run_file, "program file")->required();
  run_cmd->add_option("--seed", run_seed, "sampler seed");
  run_cmd->add_option("--fuel", fuel, "statement step budget");
  run_cmd->add_option("--retries", retries, "restarts after failed assumptions");
  run_cmd->add_option("--width", width_bits, "bit width (2..64)")->envname("ABSINT_WIDTH");
  run_cmd->add_option("--initial", run_initial, "initial value for a variable, var=value");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const Width width(width_bits);
    std::optional<Thresholds> thresholds;
    if (!thresholds_text.empty())
      thresholds = Thresholds::normalized(cli_detail::parse_threshold_list(thresholds_text), width);

    if (*analyze_cmd) {
      auto text = cli_detail::read_file(analyze_file);
      if (!text) {
        err << "error: cannot open '" << analyze_file << "'\n";
        return 2;
      }
      const Program program = parse_program(*text, width);
      AnalysisConfig cfg;
      cfg.thresholds = thresholds;
      for (const std::string& raw : initial_intervals) {
        const auto init = cli_detail::parse_initial_interval(raw);
        cfg.initial.emplace_back(init.var, Itv::make(init.low, init.up, width));
      }
      const AnalysisReport report = analyze(program, cfg);
      if (format == "json")
        out << cli_detail::report_to_json(report).dump(2) << "\n";
      else
        out << report.to_text();
      return 0;
    }

    if (*check_cmd) {
      std::vector<Program> programs;
      if (use_gen) {
        if (!check_file.empty()) {
          err << "error: pass a file or --gen, not both\n";
          return 2;
        }
        for (std::size_t i = 0; i < count; ++i)
          programs.push_back(generate_program(seed + i, gen_size, gen_vars, width));
      } else {
        if (check_file.empty()) {
          err << "error: check needs a file or --gen\n";
          return 2;
        }
        auto text = cli_detail::read_file(check_file);
        if (!text) {
          err << "error: cannot open '" << check_file << "'\n";
          return 2;
        }
        programs.push_back(parse_program(*text, width));
      }
      CheckConfig cfg;
      cfg.thresholds = thresholds;
      const std::vector<Verdict> verdicts = check_many(programs, cfg);
      bool violation = false;
      for (std::size_t i = 0; i < verdicts.size(); ++i) {
        out << cli_detail::verdict_to_json(verdicts[i], i).dump() << "\n";
        violation = violation || !verdicts[i].sound();
      }
      return violation ? 1 : 0;
    }

    if (*gen_cmd) {
      for (std::size_t i = 0; i < count; ++i) {
        if (i) out << "---\n";
        out << pretty(generate_program(seed + i, gen_size, gen_vars, width));
      }
      return 0;
    }

    if (*run_cmd) {
      auto text = cli_detail::read_file(run_file);
      if (!text) {
        err << "error: cannot open '" << run_file << "'\n";
        return 2;
      }
      const Program program = parse_program(*text, width);
      ConcreteMem memory;
      for (std::size_t v = 0; v < program.vars.size(); ++v)
        memory.values.push_back(IntM(0, width));
      for (const std::string& raw : run_initial) {
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--initial expects var=value, got '" + raw + "'");
        const std::string name = raw.substr(0, eq);
        bool found = false;
        for (std::size_t v = 0; v < program.vars.size(); ++v) {
          if (program.vars[v] == name) {
            memory.values[v] = IntM(std::stoll(raw.substr(eq + 1)), width);
            found = true;
          }
        }
        if (!found)
          throw std::invalid_argument("--initial names unknown variable '" + name + "'");
      }
      const SampleResult result =
          sample_run(*program.body, memory, run_seed, width, fuel, retries);
      switch (result.status) {
        case SampleResult::Status::Ok: {
          json vars = cli_detail::memory_json(program, result.memory);
          out << json{{"status", "ok"}, {"final", vars}}.dump() << "\n";
          return 0;
        }
        case SampleResult::Status::NoWitness:
          out << json{{"status", "no-witness"}}.dump() << "\n";
          return 0;
        case SampleResult::Status::FuelExhausted:
          out << json{{"status", "fuel-exhausted"}}.dump() << "\n";
          return 0;
      }
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const StateBudgetError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(std::move(args), std::cout, std::cerr);
}

}  // namespace absint
