// interlm: generate planted data, run model-selection searches, evaluate formulas.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "interlm/interlm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace interlm;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path() && !fs::exists(path.parent_path())) {
    throw Error(ErrorCode::io, "directory '" + path.parent_path().string() + "' does not exist");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "'" + path.string() + "': " + e.what());
  }
}

/// `out.csv` + suffix → `out<suffix>` next to it.
fs::path sibling(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double fit_formula_r2(const DataTable& table, const ModelSpec& spec) {
  return ols::fit(build_design(table, spec), table.target).r_squared;
}

ModelSpec all_bases(const Schema& schema) {
  std::set<Term> terms;
  for (const auto& f : schema.features) terms.insert(Term::base(f.name));
  return normalize_spec(terms);
}

std::vector<double> parse_probs(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "--k-probs: '" + item + "' is not a number");
    }
  }
  return out;
}

struct GenerateArgs {
  std::size_t n = 2000;
  std::optional<std::uint64_t> seed;
  fs::path out = "data.csv";
  std::optional<double> noise;
  std::optional<fs::path> truth;
  std::optional<fs::path> truth_out;
};

int cmd_generate(const GenerateArgs& args) {
  synth::GroundTruth truth = synth::default_ground_truth();
  std::uint64_t seed = 0;
  if (args.truth) {
    auto loaded = synth::truth_from_json(read_json(*args.truth));
    truth = std::move(loaded.truth);
    seed = loaded.seed;
  }
  if (args.seed) seed = *args.seed;
  if (args.noise) {
    if (!(*args.noise >= 0.0)) throw Error(ErrorCode::invalid_argument, "--noise must be >= 0");
    truth.noise_sigma = *args.noise;
  }

  const DataTable table = synth::generate(truth, args.n, seed);
  write_text(args.out, to_csv(table));
  const fs::path truth_path = args.truth_out.value_or(sibling(args.out, ".truth.json"));
  write_text(truth_path, synth::truth_to_json(truth, seed).dump(2) + "\n");

  std::cout << "n: " << table.n() << "\n"
            << "features: " << table.schema.features.size() << "\n"
            << "data: " << args.out.string() << "\n"
            << "truth: " << truth_path.string() << "\n"
            << "true model: " << truth.formula() << "\n";
  if (table.n() > 1) {
    const ModelSpec base = all_bases(table.schema);
    const auto order = table.schema.feature_names();
    std::printf("R^2 %s: %.6f\n", format_formula(table.schema.target, base, order).c_str(),
                fit_formula_r2(table, base));
    std::printf("R^2 %s: %.6f\n", truth.formula().c_str(), fit_formula_r2(table, truth.used_terms));
  }
  return 0;
}

struct SearchArgs {
  fs::path data;
  std::string target = "S";
  std::uint64_t seed = 0;
  fs::path out = "result.json";
  unsigned threads = 1;
  std::string method = "all";
  search::PriorConfig prior;
  search::StoppingRule rule;
  std::string k_probs = "0.2,0.4,0.4";
};

json method_report(const report::MethodRow& row, const SearchArgs& args, json config,
                   const ols::FitSummary& fit) {
  json j = report::to_json(row);
  j["seed"] = args.seed;
  j["config"] = std::move(config);
  j["fit"] = report::to_json(fit);
  j["runtime"] = {{"threads", args.threads}};
  return j;
}

json column_labels(const search::StepwiseResult& res) {
  json out = json::array();
  for (auto c : res.selected) out.push_back(res.design.columns[c].label(res.design.feature_order));
  return out;
}

int cmd_search(SearchArgs args) {
  args.prior.k_probs = parse_probs(args.k_probs);
  args.prior.seed = args.seed;
  args.prior.validate();
  args.rule.validate();
  if (args.threads == 0) throw Error(ErrorCode::invalid_argument, "--threads must be >= 1");

  const DataTable table = load_csv(args.data, args.target);
  const search::SearchOptions options{args.threads};
  const bool all = args.method == "all";

  std::vector<report::MethodRow> rows;
  json reports = json::array();
  auto data_config = [&](json method_config) {
    method_config["data"] = args.data.string();
    method_config["target"] = args.target;
    method_config["method"] = args.method;
    return method_config;
  };

  if (all || args.method == "priority") {
    const auto start = std::chrono::steady_clock::now();
    auto res = search::priority_search(table, args.prior, options);
    const double secs = seconds_since(start);
    rows.push_back(report::make_row("priority", res.formula, res.fit, secs));
    write_text(sibling(args.out, ".priority.trace.jsonl"), report::to_jsonl(res.trace));
    reports.push_back(
        method_report(rows.back(), args, data_config({{"prior", report::to_json(args.prior)}}),
                      res.fit));
  }
  const auto full_p = static_cast<std::size_t>(build_full_design(table).p());
  if (all || args.method == "forward") {
    const auto start = std::chrono::steady_clock::now();
    auto res = search::forward_selection(table, args.rule, options);
    const double secs = seconds_since(start);
    rows.push_back(report::make_row("forward", res.formula, res.fit, secs));
    write_text(sibling(args.out, ".forward.trace.jsonl"), report::to_jsonl(res.trace));
    json j = method_report(
        rows.back(), args,
        data_config({{"rule", report::to_json(args.rule, args.rule.max_steps.value_or(100))}}),
        res.fit);
    j["selected_columns"] = column_labels(res);
    j["guard_triggered"] = res.guard_triggered;
    reports.push_back(std::move(j));
  }
  if (all || args.method == "backward") {
    const auto start = std::chrono::steady_clock::now();
    auto res = search::backward_elimination(table, args.rule, options);
    const double secs = seconds_since(start);
    rows.push_back(report::make_row("backward", res.formula, res.fit, secs));
    write_text(sibling(args.out, ".backward.trace.jsonl"), report::to_jsonl(res.trace));
    json j = method_report(
        rows.back(), args,
        data_config({{"rule", report::to_json(args.rule, args.rule.max_steps.value_or(full_p))}}),
        res.fit);
    j["selected_columns"] = column_labels(res);
    j["guard_triggered"] = res.guard_triggered;
    j["restored_column"] = nullptr;
    if (res.restored_column) {
      j["restored_column"] = res.design.columns[*res.restored_column].label(
          res.design.feature_order);
    }
    reports.push_back(std::move(j));
  }

  if (all) {
    const std::string table_text = report::render_table(rows);
    json comparison = {{"method", "all"}, {"seed", args.seed}, {"methods", reports}};
    write_text(args.out, comparison.dump(2) + "\n");
    write_text(sibling(args.out, ".table.txt"), table_text);
    std::cout << table_text;
  } else {
    write_text(args.out, reports.front().dump(2) + "\n");
    const auto& r = rows.front();
    std::printf("%s: %s  R^2=%.6f  AIC=%.6g  runtime=%.2fs\n", r.method.c_str(),
                r.formula.c_str(), r.r_squared, r.aic, r.runtime_seconds);
  }
  return 0;
}

struct EvaluateArgs {
  fs::path data;
  std::optional<std::string> target;
  std::string formula;
  std::optional<fs::path> out;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const ParsedFormula parsed = parse_formula(args.formula);
  const std::string target = args.target.value_or(parsed.target);
  if (target != parsed.target) {
    throw Error(ErrorCode::invalid_argument,
                "formula target '" + parsed.target + "' differs from --target '" + target + "'");
  }
  const DataTable table = load_csv(args.data, target);
  const ModelSpec spec = normalize_spec(parsed.terms);
  const DesignMatrix design = build_design(table, spec);
  const auto fit = ols::fit(design, table.target);

  json columns = json::array();
  for (const auto& c : design.columns) columns.push_back(c.label(design.feature_order));
  json j = {{"formula", format_formula(target, spec, design.feature_order)},
            {"columns", columns},
            {"fit", report::to_json(fit)}};
  const std::string text = j.dump(2) + "\n";
  if (args.out) write_text(*args.out, text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model selection with second-order feature interactions"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a planted synthetic dataset and its truth");
  generate->add_option("--n", gen.n, "Number of rows")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "RNG seed (default: truth file seed, else 0)");
  generate->add_option("--out", gen.out, "Output CSV path");
  generate->add_option("--noise", gen.noise, "Override noise sigma");
  generate->add_option("--truth", gen.truth, "Ground-truth JSON to plant instead of the default");
  generate->add_option("--truth-out", gen.truth_out,
                       "Where to write the truth JSON (default: <out>.truth.json)");

  SearchArgs srch;
  auto* search_cmd = app.add_subcommand("search", "Run priority, forward and/or backward search");
  search_cmd->add_option("--data", srch.data, "Input CSV")->required();
  search_cmd->add_option("--target", srch.target, "Target column");
  search_cmd->add_option("--seed", srch.seed, "Seed for priority search");
  search_cmd->add_option("--out", srch.out, "Result JSON path");
  search_cmd->add_option("--threads", srch.threads, "Worker threads");
  search_cmd->add_option("--method", srch.method)
      ->check(CLI::IsMember({"priority", "forward", "backward", "all"}));
  search_cmd->add_option("--iterations", srch.prior.iterations, "Priority search iterations");
  search_cmd->add_option("--alpha", srch.rule.alpha, "Significance level");
  search_cmd->add_option("--k-probs", srch.k_probs, "Prior over #interactions, e.g. 0.2,0.4,0.4");
  search_cmd->add_option("--p-base", srch.prior.p_base, "Base feature inclusion probability");
  search_cmd->add_option("--aic-abs", srch.rule.aic_abs_jump, "Absolute AIC surge threshold");
  search_cmd->add_option("--aic-rel", srch.rule.aic_rel_jump, "Relative AIC surge threshold");

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Fit one formula and report its statistics");
  evaluate->add_option("--data", eval.data, "Input CSV")->required();
  evaluate->add_option("--target", eval.target, "Target column (default: formula target)");
  evaluate->add_option("--formula", eval.formula, "e.g. \"S ~ C + E + M*G + O + W\"")->required();
  evaluate->add_option("--out", eval.out, "Also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[E_USAGE]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*search_cmd) return cmd_search(srch);
    if (*evaluate) return cmd_evaluate(eval);
  } catch (const Error& e) {
    std::cerr << "error[" << code_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[E_INTERNAL]: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
