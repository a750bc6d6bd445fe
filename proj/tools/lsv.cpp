#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lsv/fuzz.hpp"
#include "lsv/interp.hpp"
#include "lsv/parser.hpp"
#include "lsv/printer.hpp"
#include "lsv/prover.hpp"

namespace {

std::string readFile(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::map<std::string, lsv::Value> parseState(const std::string &text) {
  std::map<std::string, lsv::Value> out;
  if (text.empty())
    return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad state entry '" + item + "', expected k=v");
    std::string key = item.substr(0, eq);
    std::string val = item.substr(eq + 1);
    if (val == "true")
      out[key] = true;
    else if (val == "false")
      out[key] = false;
    else {
      try {
        out[key] = static_cast<std::int64_t>(std::stoll(val));
      } catch (...) {
        throw std::runtime_error("bad state value '" + val + "'");
      }
    }
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"loop-scope symbolic-execution verifier"};
  app.require_subcommand(1);

  // prove
  auto *prove = app.add_subcommand("prove", "prove an annotated program file");
  std::string proveFilePath;
  lsv::ProveOptions popts;
  prove->add_option("file", proveFilePath, "annotated program")->required();
  prove->add_option("--bound", popts.bound, "bounded-solver domain bound");
  prove->add_option("--budget", popts.budget,
                    "bounded-solver assignment budget");
  prove->add_option("--max-steps", popts.maxSteps, "rule application budget");
  prove->add_option("--emit-smt", popts.emitSmtDir,
                    "emit SMT-LIB scripts for unclosed leaves into DIR");
  prove->add_option("--proof-out", popts.proofOut,
                    "write the proof tree (text, or DOT for .dot files)");

  // run
  auto *runCmd = app.add_subcommand("run", "run a program concretely");
  std::string runFilePath, stateText;
  std::int64_t fuel = 10000;
  runCmd->add_option("file", runFilePath, "program file")->required();
  runCmd->add_option("--state", stateText, "initial state, e.g. b=true,i=0");
  runCmd->add_option("--fuel", fuel, "statement budget");

  // desugar
  auto *desugarCmd =
      app.add_subcommand("desugar", "apply one loop rule as a source transform");
  std::string desugarFilePath, ruleName;
  std::size_t occurrence = 1;
  desugarCmd->add_option("file", desugarFilePath, "program file")->required();
  desugarCmd->add_option("--rule", ruleName, "rule name")->required();
  desugarCmd->add_option("--occurrence", occurrence,
                         "loop occurrence, 1-based in source order");

  // fuzz-rules
  auto *fuzzCmd = app.add_subcommand(
      "fuzz-rules", "differentially test rewriting rules against the interpreter");
  lsv::FuzzOptions fopts;
  fuzzCmd->add_option("--seed", fopts.seed, "random seed");
  fuzzCmd->add_option("--trials", fopts.trials, "trials per rule");
  fuzzCmd->add_option("--rule", fopts.rule, "only this rule");
  fuzzCmd->add_option("--domain-bound", fopts.domainBound,
                      "integer domain bound for initial states");
  fuzzCmd->add_option("--states-per-trial", fopts.statesPerTrial,
                      "initial states sampled per generated program");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prove->parsed()) {
      lsv::ProveResult res = lsv::proveFile(readFile(proveFilePath), popts);
      std::cout << res.report.render();
      return lsv::verdictExitCode(res.report);
    }
    if (runCmd->parsed()) {
      lsv::StmtList program = lsv::parseProgram(readFile(runFilePath));
      lsv::ConcreteState init(parseState(stateText));
      lsv::Outcome o = lsv::run(program, init, fuel);
      std::cout << lsv::outcomeToString(o) << "\n";
      return 0;
    }
    if (desugarCmd->parsed()) {
      lsv::StmtList program = lsv::parseProgram(readFile(desugarFilePath));
      std::cout << lsv::desugar(program, ruleName, occurrence);
      return 0;
    }
    if (fuzzCmd->parsed()) {
      lsv::FuzzReport rep = lsv::fuzzRules(fopts);
      std::cout << rep.render();
      std::cout << "json: " << rep.toVerdictReport().toJson() << "\n";
      return rep.failed ? 1 : 0;
    }
  } catch (const lsv::ParseError &e) {
    std::cerr << "error:" << e.line << ":" << e.col << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
