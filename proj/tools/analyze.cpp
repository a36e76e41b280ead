// Command-line driver: parse programs and stubs, solve, write summaries and a report.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "symsum/cli.hpp"
#include "symsum/oracle.hpp"
#include "symsum/scfg.hpp"

namespace fs = std::filesystem;
using namespace symsum;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infer security summaries for a three-address program"};
  std::vector<std::string> programs, stubFiles;
  std::string model = "lprec", outDir = "out";
  std::size_t maxNodes = SolveOptions{}.max_nodes, maxIters = SolveOptions{}.max_iters;
  std::size_t trials = 0, fuel = 200;
  bool verbose = false, wantDot = false;
  app.add_option("programs", programs, "Program files (.sir)")->required()->check(CLI::ExistingFile);
  app.add_option("--heap-model", model, "Heap abstraction")
      ->check(CLI::IsMember({"lprec", "hprec"}));
  app.add_option("--stubs", stubFiles, "Stub files (.secstubs)")->check(CLI::ExistingFile);
  app.add_option("--out", outDir, "Output directory");
  app.add_option("--max-nodes", maxNodes, "Decision-diagram node budget per method");
  app.add_option("--max-iters", maxIters, "Inferences per method before giving up");
  auto* ni = app.add_option("--check-ni", trials, "Check noninterference with this many random input pairs per method");
  app.add_option("--fuel", fuel, "Interpreter step budget for the check")->needs(ni);
  app.add_flag("--verbose-effects", verbose, "Keep identity assignments");
  app.add_flag("--dump-scfg", wantDot, "Write a DOT graph per inferred method");
  CLI11_PARSE(app, argc, argv);

  SolveOptions opts;
  opts.model = model == "hprec" ? HeapModel::HPrec : HeapModel::LPrec;
  opts.max_nodes = maxNodes;
  opts.max_iters = maxIters;

  ir::Program program;
  std::map<ir::MethodSig, Summary> stubs;
  try {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& p : programs) files.emplace_back(p, slurp(p));
    program = ir::parsePrograms(files);
    for (const auto& f : stubFiles)
      for (auto& [sig, s] : parseStubs(slurp(f), opts.model, f))
        if (!stubs.emplace(sig, std::move(s)).second)
          throw StubError(f, 0, "duplicate stub for " + sig.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  auto t0 = std::chrono::steady_clock::now();
  SummaryTable table;
  try {
    table = solveProgram(program, stubs, opts);
  } catch (const NonTermination& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<std::string> extra;
  bool niFailed = false;
  if (trials > 0) {
    NiOptions no;
    no.trials = trials;
    no.fuel = fuel;
    Interpreter in(program, table);
    for (const auto& [sig, s] : table.summaries) {
      if (table.reports.at(sig).provenance != Provenance::Inferred) continue;
      auto verdict = checkNoninterference(in, sig, s.guard, no);
      if (!verdict.ok) niFailed = true;
      extra.push_back("ni " + sig.str() + ": " + (!verdict.ok       ? "FAIL " + verdict.counterexample
                                                  : verdict.vacuous ? std::string("ok (vacuous: guard admits no sampled context)")
                                                                    : "ok (" + std::to_string(verdict.pairs) + " pairs)"));
    }
  }
  {
    std::ostringstream t;
    t.setf(std::ios::fixed);
    t.precision(3);
    t << "time " << seconds << " s";
    extra.insert(extra.begin(), t.str());
  }

  try {
    fs::create_directories(outDir);
    EmitOptions eo;
    eo.verbose_effects = verbose;
    for (const auto& [sig, s] : table.summaries) {
      if (table.reports.at(sig).provenance == Provenance::Stub) continue;
      spit(fs::path(outDir) / (sig.fileStem() + ".summary"), emitSummary(s, eo));
      if (wantDot && table.reports.at(sig).provenance == Provenance::Inferred) {
        ir::Method m = ir::normalizeMethod(*program.findMethod(sig));
        auto env = [&](std::size_t i) { return callTargets(table, sig, i); };
        Scfg g = buildScfg(m, env, opts.model, opts.max_nodes);
        spit(fs::path(outDir) / (sig.fileStem() + ".dot"), dumpScfg(g));
      }
    }
    std::string report = renderReport(table, extra);
    spit(fs::path(outDir) / "report.txt", report);
    std::cout << report;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return niFailed ? 2 : 0;
}
