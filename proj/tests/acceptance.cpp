// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dkit/causality.hpp"
#include "dkit/cli.hpp"
#include "dkit/errors.hpp"
#include "dkit/system_file.hpp"
#include "support/planted.hpp"

namespace {

using namespace dkit;
using R = Rational;
using MR = Matrix<Rational>;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Prepared {
  DescriptorSystem<R> sys;
  WeierstrassDecomposition<R> w;
  TransformedInput<R> tin;

  explicit Prepared(DescriptorSystem<R> s)
      : sys(std::move(s)), w(decompose(sys.pencil())), tin(transform_input(w, sys.B())) {}
};

Prepared prepare(const testing::PlantedSystem& p) {
  return Prepared(DescriptorSystem<R>(p.F, p.G, p.B, p.C));
}

std::string fixture(const std::string& name) { return std::string(DKIT_FIXTURES) + "/" + name; }

// 1. decompose -> verify is exactly zero and recovers the planted blocks.
Outcome reconstruction() {
  std::mt19937_64 rng(1001);
  int ok = 0, total = 0, with_q = 0;
  for (; total < 200; ++total) {
    const auto planted = testing::random_planted_system(rng, total % 2 == 0);
    const Pencil<R> pencil(planted.F, planted.G);
    const auto w = decompose(pencil);
    const bool exact = verify(pencil, w).exact_zero && w.P * planted.F * w.Q == w.Fw() &&
                       w.P * planted.G * w.Q == w.Gw();
    const bool blocks = w.jordan_blocks == canonical_jordan_specs(planted.spec.jordan) &&
                        w.nilpotent_blocks == canonical_nilpotent_specs(planted.spec.nilpotent);
    ok += exact && blocks;
    with_q += w.q > 0;
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " pencils exact, " +
                           std::to_string(with_q) + " with q >= 1"};
}

// 2. residual_oracle(solve) = 0 and closed form = recursion for K <= 20.
Outcome solution_correctness() {
  std::mt19937_64 rng(1002);
  int ok = 0, total = 0;
  for (; total < 200; ++total) {
    const auto planted = testing::random_planted_system(rng, total % 2 == 0);
    const auto s = prepare(planted);
    const long k0 = testing::uniform(rng, -3, 3);
    const long horizon = k0 + testing::uniform(rng, 1, 20);
    const auto u = testing::random_input(s.sys.inputs(), k0, horizon + static_cast<long>(s.w.q_star), rng);
    const MR z = testing::random_int_matrix(s.w.p, 1, rng, 5);
    const MR y0 = s.w.Qp() * z + s.w.Q * compute_dk(s.w, s.tin, u, k0).stacked();
    const auto traj = solve(s.sys, s.w, s.tin, u, y0, horizon);
    bool good = residual_oracle(s.sys, u, traj, y0).exact_zero;
    for (long k = k0; k <= horizon && good; ++k)
      good = traj.zp[static_cast<std::size_t>(k - k0)] == finite_state_closed_form(s.w, s.tin, u, z, k);
    ok += good;
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " trajectories with zero residual"};
}

// 3. Points on colspan Q_p + Q D_k0 are accepted, displaced points rejected.
Outcome consistency_condition() {
  std::mt19937_64 rng(1003);
  int accepted = 0, rejected = 0, confirmed = 0, total = 0;
  for (; total < 100; ++total) {
    const auto planted = testing::random_planted_system(rng, true);
    const auto s = prepare(planted);
    const long k0 = testing::uniform(rng, -2, 2);
    const long last = k0 + 2 * static_cast<long>(s.w.q_star) + 3;
    const auto u = testing::random_input(s.sys.inputs(), k0, last, rng);
    const std::size_t steps = std::max<std::size_t>(s.w.q_star, 1);
    const MR inside = s.w.Qp() * testing::random_int_matrix(s.w.p, 1, rng, 5) +
                      s.w.Q * compute_dk(s.w, s.tin, u, k0).stacked();
    MR e = testing::random_int_matrix(s.w.q, 1, rng, 3);
    if (e.is_zero()) e(0, 0) = 1;
    const MR outside = inside + s.w.Qq() * e;

    if (check_consistency(s.sys, s.w, s.tin, u, inside).consistent &&
        residual_oracle(s.sys, u, solve(s.sys, s.w, s.tin, u, inside, k0 + 3), inside).exact_zero &&
        testing::stacked_steps_solvable(s.sys, u, inside, steps))
      ++accepted;
    if (!check_consistency(s.sys, s.w, s.tin, u, outside).consistent) {
      ++rejected;
      confirmed += !testing::stacked_steps_solvable(s.sys, u, outside, steps);
    }
  }
  return {accepted == total && rejected == total && confirmed == total,
          std::to_string(accepted) + "/" + std::to_string(total) + " accepted, " + std::to_string(rejected) + "/" +
              std::to_string(total) + " rejected, " + std::to_string(confirmed) + " rejections unsolvable"};
}

struct CorpusStats {
  int systems = 0, with_q = 0;
  int state_agree = 0, output_agree = 0, nullspace_agree = 0;
  int state_noncausal = 0, output_noncausal = 0;
  int implication_violations = 0, q0_violations = 0;
};

CorpusStats causality_corpus() {
  std::mt19937_64 rng(1004);
  CorpusStats st;
  for (; st.systems < 100; ++st.systems) {
    const auto planted = testing::random_planted_system(rng, st.systems % 2 == 0);
    const auto s = prepare(planted);
    st.with_q += s.w.q > 0;
    const long horizon = static_cast<long>(s.w.q_star) + 5;
    const bool state = check_state_causality(s.w, s.tin).causal;
    const bool output = check_output_causality(s.sys, s.w, s.tin).causal;
    const bool nullspace = check_output_causality_nullspace(s.sys, s.w, s.tin);
    const auto oracle_state =
        brute_force_causality_oracle(s.sys, s.w, s.tin, CausalityMode::State, horizon, 50, rng);
    const auto oracle_output =
        brute_force_causality_oracle(s.sys, s.w, s.tin, CausalityMode::Output, horizon, 50, rng);
    st.state_agree += state == oracle_state.causal;
    st.output_agree += output == oracle_output.causal;
    st.nullspace_agree += nullspace == output;
    st.state_noncausal += !state;
    st.output_noncausal += !output;
    st.implication_violations += state && !(output && nullspace);
    st.q0_violations += s.w.q == 0 && !(state && output && nullspace);
  }
  return st;
}

// 4. Criteria agree with the brute-force oracle.
Outcome criteria_vs_definition(const CorpusStats& st) {
  std::ostringstream d;
  d << "state " << st.state_agree << "/" << st.systems << ", output " << st.output_agree << "/" << st.systems
    << ", nullspace form " << st.nullspace_agree << "/" << st.systems << " (" << st.with_q << " with q >= 1, "
    << st.state_noncausal << " state and " << st.output_noncausal << " output non-causal)";
  return {st.state_agree == st.systems && st.output_agree == st.systems && st.nullspace_agree == st.systems &&
              2 * st.with_q >= st.systems,
          d.str()};
}

// 5. State-causal implies output-causal; q = 0 implies causal.
Outcome structural_implications(const CorpusStats& st) {
  return {st.implication_violations == 0 && st.q0_violations == 0,
          std::to_string(st.implication_violations) + " implication and " + std::to_string(st.q0_violations) +
              " q = 0 violations over " + std::to_string(st.systems) + " systems"};
}

// 6. (MFN, MGN, MB, CN) keeps verdicts and block specs. With F' = M F N the
// state maps as Y = N Y', so C N is the output map of the equivalent system;
// the literal C N^-1 is run alongside and only reported.
Outcome equivalence_invariance() {
  std::mt19937_64 rng(1006);
  int ok = 0, total = 0, literal_output_changes = 0;
  for (; total < 50; ++total) {
    const auto planted = testing::random_planted_system(rng, total % 2 == 0);
    const std::size_t n = planted.F.rows();
    const MR m = testing::random_nonsingular_rational(n, rng);
    const MR k = testing::random_nonsingular_rational(n, rng);
    const auto a = prepare(planted);
    const Prepared b(DescriptorSystem<R>(m * planted.F * k, m * planted.G * k, m * planted.B, planted.C * k));
    const Prepared c(DescriptorSystem<R>(m * planted.F * k, m * planted.G * k, m * planted.B,
                                         planted.C * *inverse(k)));
    const auto ra = analyze_causality(a.sys, a.w, a.tin);
    const auto rb = analyze_causality(b.sys, b.w, b.tin);
    const auto rc = analyze_causality(c.sys, c.w, c.tin);
    ok += ra.state_input_causal == rb.state_input_causal && ra.output_input_causal == rb.output_input_causal &&
          ra.nullspace_form_causal == rb.nullspace_form_causal && a.w.jordan_blocks == b.w.jordan_blocks &&
          a.w.nilpotent_blocks == b.w.nilpotent_blocks && verify(b.sys.pencil(), b.w).exact_zero;
    literal_output_changes += ra.output_input_causal != rc.output_input_causal;
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " transformed systems match (output map C N; with C N^-1 the output verdict changed in " +
                           std::to_string(literal_output_changes) + ")"};
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "dkit");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

// 7. Worked fixtures through the CLI, bit-exact.
Outcome worked_fixtures() {
  std::vector<std::string> failures;
  auto check = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };

  const auto analyze = cli_run({"analyze", fixture("diag.json"), "--json"});
  check(analyze.code == 0, "diag analyze exit");
  if (analyze.code == 0) {
    const auto j = nlohmann::json::parse(analyze.out);
    check(j["p"] == 1 && j["q"] == 1 && j["q_star"] == 1,
          "diag p/q/q_star");
    check(j["causality"]["state_input_causal"] == true && j["causality"]["output_input_causal"] == true,
          "diag verdicts");
  }
  const auto solved = cli_run({"solve", fixture("diag.json")});
  check(solved.code == 0 && solved.out ==
                                "k,Y_1,Y_2,X_1,X_2,Zp_1,Zq_1\n"
                                "0,5,-1,5,-1,5,-1\n"
                                "1,11,-1,11,-1,11,-1\n"
                                "2,23,-1,23,-1,23,-1\n"
                                "3,47,-1,47,-1,47,-1\n",
        "diag trajectory");

  const auto c1 = cli_run({"causality", fixture("nilpotent3_c1.json"), "--json"});
  check(c1.code == 0, "C=[1,0,0] exit");
  if (c1.code == 0) {
    const auto j = nlohmann::json::parse(c1.out);
    check(j["state_input_causal"] == false && j["output_input_causal"] == true, "C=[1,0,0] verdicts");
    check(j["criterion_state"] == nlohmann::json::parse(R"([["1"],["0"]])"), "C=[1,0,0] witness");
  }
  const auto c1_text = cli_run({"causality", fixture("nilpotent3_c1.json"), "--oracle-trials", "50"});
  check(c1_text.code == 0 && c1_text.out.find("agrees") != std::string::npos, "C=[1,0,0] oracle");

  const auto ci = cli_run({"causality", fixture("nilpotent3_ci.json"), "--json"});
  check(ci.code == 0, "C=I3 exit");
  if (ci.code == 0) {
    const auto j = nlohmann::json::parse(ci.out);
    check(j["state_input_causal"] == false && j["output_input_causal"] == false, "C=I3 verdicts");
    check(j["criteria_output"][0] == nlohmann::json::parse(R"([["0"],["1"],["0"]])"), "C=I3 witness");
  }

  std::string detail = "diag, 3x3 with C=[1,0,0], 3x3 with C=I3";
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

// 8. The same fixtures in float mode.
Outcome float_sanity() {
  std::vector<std::string> failures;
  double worst = 0.0;
  for (const char* name : {"diag.json", "nilpotent3_c1.json", "nilpotent3_ci.json"}) {
    const auto file = load_system_file(fixture(name));
    const auto& d = std::get<SystemData<R>>(file.data);
    const Prepared exact(DescriptorSystem<R>(d.F, d.G, d.B, d.C));
    const DescriptorSystem<Complex> fsys(to_complex(d.F), to_complex(d.G), to_complex(d.B), to_complex(d.C));
    const auto w = decompose(fsys.pencil());
    const auto tin = transform_input(w, fsys.B());
    const auto er = analyze_causality(exact.sys, exact.w, exact.tin);
    const auto fr = analyze_causality(fsys, w, tin);
    if (er.state_input_causal != fr.state_input_causal || er.output_input_causal != fr.output_input_causal ||
        er.nullspace_form_causal != fr.nullspace_form_causal || exact.w.p != w.p || exact.w.q_star != w.q_star)
      failures.push_back(std::string(name) + " verdicts");
    const double scale = std::max(fsys.F().max_abs(), fsys.G().max_abs());
    const auto rep = verify(fsys.pencil(), w);
    const double residual = std::max(rep.residual_f, rep.residual_g) / scale;
    worst = std::max(worst, residual);
    if (!rep.ok(1e-9 * scale)) failures.push_back(std::string(name) + " residual");

    const auto via_cli = cli_run({"causality", fixture(name), "--mode", "float", "--json"});
    if (via_cli.code != 0) {
      failures.push_back(std::string(name) + " cli");
    } else {
      const auto j = nlohmann::json::parse(via_cli.out);
      if (j["state_input_causal"] != er.state_input_causal || j["output_input_causal"] != er.output_input_causal)
        failures.push_back(std::string(name) + " cli verdicts");
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", worst);
  std::string detail = "3 fixtures, worst relative residual " + std::string(buf);
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  CorpusStats corpus;
  std::string corpus_error;
  try {
    corpus = causality_corpus();
  } catch (const std::exception& e) {
    corpus_error = e.what();
  }
  auto from_corpus = [&](Outcome (*f)(const CorpusStats&)) {
    return [&, f] {
      if (!corpus_error.empty()) return Outcome{false, "exception: " + corpus_error};
      return f(corpus);
    };
  };

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"Weierstrass reconstruction", reconstruction},
      {"solution correctness", solution_correctness},
      {"consistency condition", consistency_condition},
      {"causality criteria vs definition", from_corpus(criteria_vs_definition)},
      {"structural implications", from_corpus(structural_implications)},
      {"equivalence invariance", equivalence_invariance},
      {"worked fixtures via CLI", worked_fixtures},
      {"float-mode sanity", float_sanity},
  };

  int failed = 0;
  int index = 1;
  for (const auto& [name, body] : criteria) {
    const auto outcome = guarded(body);
    failed += !outcome.pass;
    std::cout << "criterion " << index++ << " " << (outcome.pass ? "PASS" : "FAIL") << "  " << name << ": "
              << outcome.detail << "\n";
  }
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << " ("
            << static_cast<int>(secs + 0.5) << " s)\n";
  return failed;
}
