// Copyright 2026 The qchan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 2 invalid input,
// 3 resource cap, 4 failed property suite.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qchan/measures.hpp"
#include "qchan/protocol.hpp"
#include "qchan/random.hpp"
#include "qchan/reductions.hpp"
#include "qchan/report.hpp"
#include "qchan/suites.hpp"

namespace fs = std::filesystem;
using namespace qchan;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitCap = 3;
constexpr int kExitSuiteFailed = 4;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::size_t restarts = 20;
  std::size_t max_iters = 200;
  std::string report_path;

  OptimizerConfig config(std::uint64_t salt = 0) const {
    OptimizerConfig cfg;
    cfg.seed = salt == 0 ? seed : mix_seed(seed, salt);
    cfg.restarts = restarts;
    cfg.max_iters = max_iters;
    return cfg;
  }
};

struct Loaded {
  Circuit circuit;
  std::string digest;
};

Loaded load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return {parse(text), content_digest(text)};
}

void add_input(JsonReport& r, const std::string& role, const std::string& path, const Loaded& l) {
  r.inputs[role] = Json{{"path", path}, {"digest", l.digest}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

// Emitted circuits must read back to the same circuit.
void write_circuit(const fs::path& path, const Circuit& c) {
  const std::string text = serialize(c);
  if (!(parse(text) == c)) throw std::logic_error("emitted circuit does not re-parse: " + path.string());
  write_text(path, text);
}

Matrix input_state(const std::string& kind, std::size_t qubits) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  if (kind == "mixed") return Matrix::Identity(d, d) / static_cast<double>(d);
  Matrix m = Matrix::Zero(d, d);
  m(0, 0) = 1.0;
  return m;
}

// ------------------------------------------------------------------ measure

struct MeasureArgs {
  std::string op;
  std::string circuit, circuit2;
  std::optional<double> p;
  std::string input = "zero";
};

Json run_measure(const MeasureArgs& a, const Common& common, JsonReport& report) {
  const Loaded c1 = load(a.circuit);
  add_input(report, "circuit", a.circuit, c1);
  std::optional<Loaded> c2;
  if (!a.circuit2.empty()) {
    c2 = load(a.circuit2);
    add_input(report, "circuit2", a.circuit2, *c2);
  }
  report.parameters["op"] = a.op;
  report.parameters["input"] = a.input;
  report.parameters["restarts"] = common.restarts;
  report.parameters["max_iters"] = common.max_iters;
  if (a.p) report.parameters["p"] = *a.p;

  const bool pair_op = a.op == "trace-norm" || a.op == "fidelity" || a.op == "fmax" || a.op == "diamond" || a.op == "helstrom";
  if (pair_op && !c2) throw InvalidInput("--op " + a.op + " needs --circuit2");
  if ((a.op == "renyi" || a.op == "nup") && !a.p) throw InvalidInput("--op " + a.op + " needs --p");
  const Channel q1 = to_channel(c1.circuit);
  std::optional<Channel> q2;
  if (c2) {
    q2 = to_channel(c2->circuit);
    if (q1.in_dim() != q2->in_dim() || q1.out_dim() != q2->out_dim()) {
      throw InvalidInput("circuits have different input or output sizes");
    }
  }
  const Matrix rho = input_state(a.input, c1.circuit.num_inputs());
  Json results;
  if (a.op == "trace-norm") {
    results["value"] = trace_norm(Matrix(q1.apply(rho) - q2->apply(rho)));
  } else if (a.op == "fidelity") {
    results["value"] = fidelity(q1.apply(rho), q2->apply(rho));
  } else if (a.op == "entropy") {
    results["value"] = von_neumann_entropy(q1.apply(rho));
  } else if (a.op == "renyi") {
    results["value"] = renyi_entropy(q1.apply(rho), *a.p);
  } else if (a.op == "helstrom") {
    const HelstromResult h = helstrom(q1.apply(rho), q2->apply(rho));
    results["value"] = h.success;
    results["accept_first"] = matrix_json(h.accept_first);
  } else if (a.op == "smin") {
    results = to_json(min_output_entropy(q1, common.config()));
  } else if (a.op == "nup") {
    results = to_json(max_output_p_norm(q1, *a.p, common.config()));
  } else if (a.op == "fmax") {
    results = to_json(max_output_fidelity(q1, *q2, common.config()));
  } else {
    results = to_json(diamond_distance(q1, *q2, common.config()));
  }
  return results;
}

// ------------------------------------------------------------------- reduce

struct ReduceArgs {
  std::string kind;
  std::string circuit, circuit2;
  std::size_t r = 2;
  std::size_t n = 1;
  double a = 1.0, b = 0.25;
  std::size_t anc = 1;
  std::size_t pieces = 1;
  std::size_t verifier_qubits = 1;
  std::string out_dir;
  bool verify = false;
};

Circuit normal_form(const Circuit& c, ReductionReport* notes, const std::string& role) {
  if (in_stinespring_form(c)) return c;
  if (notes) notes->notes.push_back(role + ": converted to Stinespring normal form");
  return to_stinespring_form(c);
}

double measured_diamond(const Circuit& a, const Circuit& b, const OptimizerConfig& cfg) {
  return diamond_distance(to_channel(a), to_channel(b), cfg).value;
}

// Adds a measurement, or a note when the circuits are too wide to compile.
template <typename F>
void measure_into(ReductionReport& r, const std::string& quantity, std::uint64_t seed, F&& f) {
  try {
    r.measured.push_back({quantity, f(), seed});
  } catch (const ResourceCapError& e) {
    r.notes.push_back(quantity + " not measured: " + e.what());
  }
}

Json run_reduce(const ReduceArgs& a, const Common& common, JsonReport& report) {
  const Loaded l1 = load(a.circuit);
  add_input(report, "circuit", a.circuit, l1);
  std::optional<Loaded> l2;
  const bool pair = a.kind != "degradable" && a.kind != "antidegradable" && a.kind != "mixed-unitary";
  if (pair) {
    if (a.circuit2.empty()) throw InvalidInput("--kind " + a.kind + " needs --circuit2");
    l2 = load(a.circuit2);
    add_input(report, "circuit2", a.circuit2, *l2);
  }
  report.parameters["kind"] = a.kind;
  report.parameters["verify"] = a.verify;
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);

  const Circuit& q1 = l1.circuit;
  ReductionReport rep;
  std::vector<std::pair<std::string, const Circuit*>> files;
  std::optional<CircuitPair> cp;
  std::optional<Embedding> emb;
  std::optional<CircuitResult> single;
  const std::uint64_t s = common.seed;

  if (a.kind == "product" || a.kind == "xor") {
    report.parameters["r"] = a.r;
    cp = a.kind == "product" ? direct_product(q1, l2->circuit, a.r) : xor_mix(q1, l2->circuit, a.r);
    rep = cp->report;
    if (a.verify) {
      measure_into(rep, "diamond(Q1,Q2)", s, [&] { return measured_diamond(q1, l2->circuit, common.config()); });
      measure_into(rep, "diamond(C1,C2)", s, [&] { return measured_diamond(cp->first, cp->second, common.config()); });
    }
  } else if (a.kind == "polarize") {
    report.parameters["n"] = a.n;
    report.parameters["a"] = a.a;
    report.parameters["b"] = a.b;
    cp = polarize(q1, l2->circuit, a.n, a.a, a.b);
    rep = cp->report;
    if (a.verify) {
      measure_into(rep, "diamond(Q1,Q2)", s, [&] { return measured_diamond(q1, l2->circuit, common.config()); });
      measure_into(rep, "diamond(C1,C2)", s, [&] { return measured_diamond(cp->first, cp->second, common.config()); });
    }
  } else if (a.kind == "qip2ci") {
    report.parameters["verifier_qubits"] = a.verifier_qubits;
    const std::size_t total = q1.num_inputs();
    if (a.verifier_qubits == 0 || a.verifier_qubits > total) throw InvalidInput("--verifier-qubits out of range");
    VerifierSpaces spaces;
    for (std::size_t k = 0; k < total; ++k) (k < a.verifier_qubits ? spaces.verifier : spaces.message).push_back(k);
    cp = qip_to_close_images(q1, l2->circuit, spaces);
    rep = cp->report;
    if (a.verify) {
      measure_into(rep, "max_acceptance", s, [&] { return ci_acceptance(cp->first, cp->second, common.config()); });
    }
  } else if (a.kind == "ci2logdepth") {
    report.parameters["pieces"] = a.pieces;
    ReductionReport pre;
    const Circuit n1 = normal_form(q1, &pre, "q1"), n2 = normal_form(l2->circuit, &pre, "q2");
    cp = ci_to_logdepth(n1, n2, a.pieces);
    rep = cp->report;
    rep.notes.insert(rep.notes.begin(), pre.notes.begin(), pre.notes.end());
    if (a.verify) {
      rep.measured.push_back({"depth(C1)", static_cast<double>(depth(cp->first)), s});
      rep.measured.push_back({"depth(C2)", static_cast<double>(depth(cp->second)), s});
    }
  } else if (a.kind == "ci2qcd") {
    ReductionReport pre;
    const Circuit n1 = normal_form(q1, &pre, "q1"), n2 = normal_form(l2->circuit, &pre, "q2");
    cp = ci_to_qcd(n1, n2);
    rep = cp->report;
    rep.notes.insert(rep.notes.begin(), pre.notes.begin(), pre.notes.end());
    if (a.verify) {
      measure_into(rep, "diamond(C1,C2) / 2", s, [&] { return 0.5 * measured_diamond(cp->first, cp->second, common.config()); });
      measure_into(rep, "Fmax(Q1,Q2)", s, [&] {
        return max_output_fidelity(to_channel(q1), to_channel(l2->circuit), common.config()).value;
      });
    }
  } else if (a.kind == "degradable" || a.kind == "antidegradable") {
    const bool anti = a.kind == "antidegradable";
    emb = anti ? antidegradable_embed(q1) : degradable_embed(q1);
    rep = emb->report;
    if (a.verify) {
      measure_into(rep, anti ? "choi(antidegrader o C^c - C)" : "choi(degrader o C - C^c)", s, [&] {
        const Channel ch = to_stinespring_channel(emb->circuit);
        return (anti ? verify_degrading(emb->map, complement(ch), 1e-9) : verify_degrading(emb->map, ch, 1e-9)).residual;
      });
    }
  } else {
    report.parameters["anc"] = a.anc;
    ReductionReport pre;
    const Circuit n1 = normal_form(q1, &pre, "q");
    single = mixed_unitary_circuit(n1, a.anc);
    rep = single->report;
    rep.notes.insert(rep.notes.begin(), pre.notes.begin(), pre.notes.end());
    if (a.verify) {
      measure_into(rep, "simulation residual on |0>_A (x) sigma", s, [&] {
        Rng rng(mix_seed(s, 1));
        const std::size_t m = static_cast<std::size_t>(rep.parameter("m"));
        const Matrix sigma = random_density(std::size_t{1} << n1.num_inputs(), rng);
        const Matrix out = CircuitMap(single->circuit).apply(kron(input_state("zero", m), sigma), 1);
        const Channel q = to_channel(n1);
        const auto db = static_cast<Eigen::Index>(static_cast<std::size_t>(out.rows()) / q.out_dim());
        return max_abs(Matrix(out - kron(q.apply(sigma), Matrix(Matrix::Identity(db, db) / static_cast<double>(db)))));
      });
    }
  }

  if (cp) {
    const bool qip = a.kind == "qip2ci";
    files = {{qip ? "q1.qc" : "c1.qc", &cp->first}, {qip ? "q2.qc" : "c2.qc", &cp->second}};
  } else if (emb) {
    files = {{"c.qc", &emb->circuit}, {a.kind == "degradable" ? "degrader.qc" : "antidegrader.qc", &emb->map_circuit}};
  } else {
    files = {{"c.qc", &single->circuit}};
  }
  Json artifacts = Json::object();
  for (const auto& [name, c] : files) {
    write_circuit(dir / name, *c);
    artifacts[name] = Json{{"digest", digest(*c)}, {"inputs", c->num_inputs()}, {"outputs", c->num_outputs()},
                           {"size", size(*c)}, {"depth", depth(*c)}};
  }
  Json results;
  results["report"] = to_json(rep);
  results["files"] = artifacts;
  write_text(dir / "report.json", dump_json(results["report"]));
  return results;
}

// ----------------------------------------------------------------- protocol

struct ProtocolArgs {
  std::string circuit, circuit2;
  std::string strategy = "honest";
  std::size_t resolution = 16;
  std::size_t trials = 0;
};

Json run_protocol(const ProtocolArgs& a, const Common& common, JsonReport& report) {
  const Loaded l1 = load(a.circuit), l2 = load(a.circuit2);
  add_input(report, "circuit", a.circuit, l1);
  add_input(report, "circuit2", a.circuit2, l2);
  report.parameters["strategy"] = a.strategy;
  if (a.strategy == "grid") report.parameters["resolution"] = a.resolution;
  report.parameters["trials"] = a.trials;
  report.parameters["restarts"] = common.restarts;
  ProverSpec prover;
  prover.kind = parse_strategy(a.strategy);
  prover.resolution = a.resolution;
  return to_json(run_qcd_protocol(l1.circuit, l2.circuit, prover, common.config(), a.trials));
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--restarts", c.restarts, "Optimizer restarts")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", c.max_iters, "Optimizer iterations per restart")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--report", c.report_path, "Also write the JSON report to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qchan: channel distances, circuit reductions and protocol simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Common common;

  MeasureArgs ma;
  auto* measure = app.add_subcommand("measure", "Evaluate a measure on one or two circuits");
  measure->add_option("--op", ma.op)->required()->check(CLI::IsMember(
      {"trace-norm", "fidelity", "entropy", "renyi", "smin", "nup", "fmax", "diamond", "helstrom"}));
  measure->add_option("--circuit", ma.circuit)->required();
  measure->add_option("--circuit2", ma.circuit2);
  measure->add_option("--p", ma.p, "Order for renyi and nup");
  measure->add_option("--input", ma.input, "Input state for state measures")->capture_default_str()->check(CLI::IsMember({"zero", "mixed"}));
  add_common(measure, common);

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Build a reduction and write its circuits and report");
  reduce->add_option("--kind", ra.kind)->required()->check(CLI::IsMember(
      {"product", "xor", "polarize", "qip2ci", "ci2logdepth", "ci2qcd", "degradable", "antidegradable", "mixed-unitary"}));
  reduce->add_option("--circuit", ra.circuit)->required();
  reduce->add_option("--circuit2", ra.circuit2);
  reduce->add_option("--r", ra.r, "Copies for product and xor")->capture_default_str()->check(CLI::PositiveNumber);
  reduce->add_option("--n", ra.n, "Polarization target exponent")->capture_default_str()->check(CLI::PositiveNumber);
  reduce->add_option("--a", ra.a, "Polarization upper threshold")->capture_default_str();
  reduce->add_option("--b", ra.b, "Polarization lower threshold")->capture_default_str();
  reduce->add_option("--anc", ra.anc, "Extra ancilla qubits for mixed-unitary")->capture_default_str();
  reduce->add_option("--pieces", ra.pieces, "Gates per piece for ci2logdepth")->capture_default_str()->check(CLI::PositiveNumber);
  reduce->add_option("--verifier-qubits", ra.verifier_qubits, "Leading wires forming the verifier space (qip2ci)")->capture_default_str();
  reduce->add_option("--out-dir", ra.out_dir)->required();
  reduce->add_flag("--verify", ra.verify, "Also measure the predicted quantities");
  add_common(reduce, common);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("--suite", suite)->required()->check(CLI::IsMember(suite_names()));
  add_common(verify, common);

  ProtocolArgs pa;
  auto* protocol = app.add_subcommand("protocol", "Simulate the channel-distinguishing protocol");
  protocol->add_option("--circuit", pa.circuit)->required();
  protocol->add_option("--circuit2", pa.circuit2)->required();
  protocol->add_option("--strategy", pa.strategy)->capture_default_str()->check(CLI::IsMember({"honest", "grid"}));
  protocol->add_option("--resolution", pa.resolution, "Grid points per parameter")->capture_default_str();
  protocol->add_option("--trials", pa.trials, "Sampled runs in addition to the exact value")->capture_default_str();
  add_common(protocol, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  const auto start = std::chrono::steady_clock::now();
  JsonReport report;
  report.seed = common.seed;
  int exit_code = 0;
  try {
    if (measure->parsed()) {
      report.command = "measure";
      report.results = run_measure(ma, common, report);
    } else if (reduce->parsed()) {
      report.command = "reduce";
      report.results = run_reduce(ra, common, report);
    } else if (verify->parsed()) {
      report.command = "verify";
      report.parameters["suite"] = suite;
      const SuiteResult r = run_suite(suite, common.seed);
      report.results = to_json(r);
      if (!r.passed()) exit_code = kExitSuiteFailed;
    } else {
      report.command = "protocol";
      report.results = run_protocol(pa, common, report);
    }
  } catch (const ResourceCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::logic_error& e) {
    // CircuitError, ChannelError and other invalid_argument failures.
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::runtime_error& e) {
    // InvalidInput and filesystem failures.
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  report.timings_ms["total"] = elapsed.count();
  const std::string text = dump_json(report.to_json());
  std::cout << text;
  if (!common.report_path.empty()) write_text(common.report_path, text);
  return exit_code;
}
