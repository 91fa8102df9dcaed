#include "rw/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "rw/corpus.hpp"
#include "rw/engine.hpp"
#include "rw/error.hpp"
#include "rw/stack.hpp"
#include "rw/syntax.hpp"

namespace rw {

namespace {

struct UsageError : Error {
  using Error::Error;
};

// Missing symbol or (symbol, arity) with no rules.
struct UnknownError : Error {
  using Error::Error;
};

SourceFile load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_file(buf.str());
}

std::string stats_line(const HeadKey& key, const TreeStats& s) {
  std::ostringstream o;
  o << key.symbol.str() << "/" << key.arity << ": nodes=" << s.nodes() << " switch=" << s.switches
    << " swap=" << s.swaps << " store=" << s.stores << " binnl=" << s.bin_nl << " bincl=" << s.bin_cl
    << " leaf=" << s.leaves << " fail=" << s.fails << " depth=" << s.depth << " store-size=" << s.store_size;
  return o.str();
}

int cmd_check(const std::string& path, std::ostream& out) {
  const SourceFile file = load_file(path);
  const auto rules = file.rules();
  const auto trees = trees_of_ruleset(rules);
  out << rules.size() << " rule" << (rules.size() == 1 ? "" : "s") << ", " << trees.size() << " tree"
      << (trees.size() == 1 ? "" : "s") << "\n";
  for (const auto& [key, tree] : trees) out << stats_line(key, tree_stats(tree)) << "\n";
  return kExitOk;
}

struct RunOptions {
  std::string strategy = "snf";
  std::string engine = "tree";
  std::size_t max_steps = 100'000'000;
};

EvalOptions eval_options(const RunOptions& o) {
  EvalOptions e;
  e.strategy = o.strategy == "whnf" ? Strategy::Whnf : Strategy::Snf;
  e.engine = o.engine == "naive" ? EngineKind::Naive : EngineKind::Tree;
  e.max_steps = o.max_steps;
  return e;
}

int cmd_run(const std::string& path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const SourceFile file = load_file(path);
  const EvalContext ctx(file.rules(), eval_options(opts));
  for (const auto& item : file.items) {
    if (const auto* c = std::get_if<Compute>(&item)) {
      Normalizer n(ctx);
      out << print_term(n.normalize(c->term)) << "\n";
    } else if (const auto* a = std::get_if<Assert>(&item)) {
      Normalizer n(ctx);
      if (!n.convertible(a->lhs, a->rhs)) {
        err << "line " << a->line << ": assertion failed: " << print_term(a->lhs) << " == " << print_term(a->rhs)
            << "\n";
        return kExitAssert;
      }
    }
  }
  return kExitOk;
}

struct TreeOptions {
  std::optional<std::size_t> arity;
  bool dot = false;
  std::string heuristic = "max-constructors";
};

int cmd_tree(const std::string& path, const std::string& symbol, const TreeOptions& opts, std::ostream& out) {
  const SourceFile file = load_file(path);
  const Symbol sym(symbol);
  if (!file.symbols().count(sym)) throw UnknownError("unknown symbol " + symbol);
  const auto trees = trees_of_ruleset(file.rules(), *heuristic_from_name(opts.heuristic));
  std::vector<std::pair<HeadKey, DecisionTree>> selected;
  for (const auto& [key, tree] : trees) {
    if (key.symbol == sym && (!opts.arity || key.arity == *opts.arity)) selected.emplace_back(key, tree);
  }
  if (selected.empty()) {
    throw UnknownError("no rules for " + symbol + (opts.arity ? "/" + std::to_string(*opts.arity) : std::string()));
  }
  for (const auto& [key, tree] : selected) {
    const std::string name = key.symbol.str() + "/" + std::to_string(key.arity);
    if (selected.size() > 1 && !opts.dot) out << "# " << name << "\n";
    out << (opts.dot ? to_dot(tree, name) : to_text(tree));
  }
  return kExitOk;
}

struct BenchOptions {
  std::string engine = "both";
  int repeat = 5;
  std::string json_path;
  std::size_t max_steps = 100'000'000;
};

std::string hex(std::uint64_t h) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

int cmd_bench(const std::string& target, const BenchOptions& opts, std::ostream& out) {
  if (opts.repeat < 1) throw UsageError("--repeat must be at least 1");
  std::optional<SourceFile> builtin = builtin_corpus(target);
  const SourceFile file = builtin ? std::move(*builtin) : load_file(target);
  std::vector<Term> terms;
  for (const auto& item : file.items) {
    if (const auto* c = std::get_if<Compute>(&item)) terms.push_back(c->term);
  }
  std::vector<EngineKind> engines;
  if (opts.engine != "naive") engines.push_back(EngineKind::Tree);
  if (opts.engine != "tree") engines.push_back(EngineKind::Naive);

  std::ofstream json_file;
  if (!opts.json_path.empty()) {
    json_file.open(opts.json_path);
    if (!json_file) throw UsageError("cannot write " + opts.json_path);
  }
  const auto rules = file.rules();
  for (EngineKind engine : engines) {
    EvalOptions eo;
    eo.engine = engine;
    eo.max_steps = opts.max_steps;
    const EvalContext ctx(rules, eo);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::vector<double> times;
      std::size_t steps = 0;
      std::uint64_t hash = 0;
      for (int r = 0; r < opts.repeat; ++r) {
        Normalizer n(ctx);
        const auto t0 = std::chrono::steady_clock::now();
        const Term result = n.snf(terms[i]);
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
        steps = n.steps();
        hash = alpha_hash(result);
      }
      std::sort(times.begin(), times.end());
      const std::size_t mid = times.size() / 2;
      const double median = times.size() % 2 ? times[mid] : (times[mid - 1] + times[mid]) / 2;
      nlohmann::json line = {
          {"name", terms.size() == 1 ? target : target + "#" + std::to_string(i + 1)},
          {"engine", engine == EngineKind::Tree ? "tree" : "naive"},
          {"seconds", median},
          {"steps", steps},
          {"hash", hex(hash)},
          {"repeat", opts.repeat},
      };
      out << line.dump() << "\n";
      if (json_file) json_file << line.dump() << "\n";
    }
  }
  return kExitOk;
}

int dispatch(CLI::App* check, CLI::App* run, CLI::App* tree, CLI::App* bench,
             const std::string& file, const std::string& symbol, const RunOptions& ro, const TreeOptions& to,
             const BenchOptions& bo, std::ostream& out, std::ostream& err) {
  if (check->parsed()) return cmd_check(file, out);
  if (run->parsed()) return cmd_run(file, ro, out, err);
  if (tree->parsed()) return cmd_tree(file, symbol, to, out);
  if (bench->parsed()) return cmd_bench(file, bo, out);
  throw UsageError("no subcommand given");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Higher-order rewriting with decision trees"};
  app.require_subcommand(1);
  std::string file;
  std::string symbol;
  RunOptions ro;
  TreeOptions to;
  BenchOptions bo;
  std::size_t arity = 0;

  auto* check = app.add_subcommand("check", "Parse, validate and compile a file; print tree statistics");
  check->add_option("FILE", file, "Input .rw file")->required();

  auto* run = app.add_subcommand("run", "Execute compute and assert directives");
  run->add_option("FILE", file, "Input .rw file")->required();
  run->add_option("--strategy", ro.strategy, "Normal form to compute")
      ->check(CLI::IsMember({"whnf", "snf"}))
      ->capture_default_str();
  run->add_option("--engine", ro.engine, "Matching engine")->check(CLI::IsMember({"tree", "naive"}))->capture_default_str();
  run->add_option("--max-steps", ro.max_steps, "Rewrite-step budget per directive")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* tree = app.add_subcommand("tree", "Print the decision tree compiled for a symbol");
  tree->add_option("FILE", file, "Input .rw file")->required();
  tree->add_option("SYMBOL", symbol, "Head symbol")->required();
  auto* arity_opt = tree->add_option("--arity", arity, "Only the tree for this many arguments");
  tree->add_flag("--dot", to.dot, "Emit Graphviz DOT");
  tree->add_option("--heuristic", to.heuristic, "Column selection strategy")
      ->check(CLI::IsMember({"max-constructors", "left-right"}))
      ->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Time tree and naive engines on a file or a built-in corpus");
  bench->add_option("TARGET", file, "File, fib(k), dispatch(K,M) or revnat(k)")->required();
  bench->add_option("--engine", bo.engine, "Engines to run")
      ->check(CLI::IsMember({"tree", "naive", "both"}))
      ->capture_default_str();
  bench->add_option("--repeat", bo.repeat, "Repetitions per engine (median reported)")->capture_default_str();
  bench->add_option("--json", bo.json_path, "Also write JSON lines to this file");
  bench->add_option("--max-steps", bo.max_steps, "Rewrite-step budget per run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (arity_opt->count() > 0) to.arity = arity;

  int code = kExitOk;
  with_large_stack([&] {
    try {
      code = dispatch(check, run, tree, bench, file, symbol, ro, to, bo, out, err);
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << "\n";
      code = kExitUsage;
    } catch (const std::invalid_argument& e) {
      err << "usage error: " << e.what() << "\n";
      code = kExitUsage;
    } catch (const ParseError& e) {
      err << e.what() << "\n";
      code = kExitParse;
    } catch (const ScopeError& e) {
      err << "scope error: " << e.what() << "\n";
      code = kExitValidation;
    } catch (const ValidationError& e) {
      err << e.what() << "\n";
      code = kExitValidation;
    } catch (const UnknownError& e) {
      err << e.what() << "\n";
      code = kExitValidation;
    } catch (const DivergenceError& e) {
      err << "divergence: " << e.what() << "\n";
      code = kExitDivergence;
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << "\n";
      code = kExitUsage;
    }
  });
  out.flush();
  return code;
}

}  // namespace rw
