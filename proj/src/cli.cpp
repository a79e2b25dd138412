#include "dkit/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "CLI11.hpp"

#include "dkit/causality.hpp"
#include "dkit/report.hpp"
#include "dkit/system_file.hpp"

namespace dkit::cli {

namespace {

struct Options {
  std::string file;
  std::string mode;
  Tolerances tol;
  bool json = false;
  std::string report_path;
  std::optional<long> horizon;
  std::string csv_path;
  int oracle_trials = 0;
  std::optional<long> oracle_horizon;
};

std::uint64_t oracle_seed() {
  if (const char* env = std::getenv("DKIT_SEED"); env != nullptr && *env != '\0') {
    try {
      return std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      throw ParseError("DKIT_SEED", std::string("not an unsigned integer: '") + env + "'");
    }
  }
  return std::random_device{}();
}

template <FieldScalar T>
void print_vector_row(std::ostream& out, const char* label, const Matrix<T>& v) {
  out << "  " << label << " = [";
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << format(v[i]);
  out << "]\n";
}

template <FieldScalar T>
void print_signal(std::ostream& out, const char* label, const InputSignal<T>& signal) {
  out << "  " << label << ":";
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    out << " V_" << signal.k0 + static_cast<long>(i) << "=[";
    for (std::size_t c = 0; c < signal.samples[i].size(); ++c) out << (c ? "," : "") << format(signal.samples[i][c]);
    out << "]";
  }
  out << "\n";
}

template <FieldScalar T>
bool check_regular(const Pencil<T>& pencil, const Tolerances& tol, std::ostream& err) {
  if (is_regular(pencil, tol)) return true;
  err << "error: irregular pencil: det(sF - G) vanishes identically\n";
  return false;
}

template <FieldScalar T>
int analyze(const SystemData<T>& d, const Options& opts, std::ostream& out, std::ostream& err) {
  AnalysisReport<T> report;
  report.tolerances = opts.tol;
  const Pencil<T> pencil(d.F, d.G);
  report.char_poly = char_poly(pencil, opts.tol);
  report.regular = !report.char_poly.identically_zero();

  int code = kOk;
  std::string deferred_error;
  if (report.regular) {
    const auto w = decompose(pencil, opts.tol);
    report.decomposition = w;
    report.verification = verify(pencil, w, opts.tol);
    const DescriptorSystem<T> sys(d.F, d.G, d.B, d.C, opts.tol);
    const auto tin = transform_input(w, d.B);
    report.causality = analyze_causality(sys, w, tin, opts.tol);
    if (d.Y0) {
      const InputSignal<T> input{d.k0, d.inputs};
      try {
        report.consistency = check_consistency(sys, w, tin, input, *d.Y0, opts.tol);
        if (!report.consistency->consistent) {
          code = kInconsistentInitialCondition;
          deferred_error = "initial condition Y0 is inconsistent (not in colspan Q_p + Q D_k0)";
        }
      } catch (const InputHorizonTooShort& e) {
        code = kInputHorizonTooShort;
        deferred_error = e.what();
      }
    }
  } else {
    code = kIrregularPencil;
    deferred_error = "irregular pencil: det(sF - G) vanishes identically";
  }

  if (opts.json)
    out << to_json(report).dump(2) << "\n";
  else
    print_report(out, report);
  if (!opts.report_path.empty()) {
    std::ofstream file(opts.report_path);
    if (!file) throw ParseError("--report", "cannot write '" + opts.report_path + "'");
    file << to_json(report).dump(2) << "\n";
  }
  if (!deferred_error.empty()) err << "error: " << deferred_error << "\n";
  return code;
}

template <FieldScalar T>
int solve_command(const SystemData<T>& d, const Options& opts, std::ostream& out, std::ostream& err) {
  const std::optional<long> horizon = opts.horizon ? opts.horizon : d.K;
  if (!horizon) throw ParseError("K", "no horizon given (use --K or a \"K\" field)");
  if (*horizon < d.k0) throw ParseError("K", "horizon precedes k0");
  if (!d.Y0) throw ParseError("Y0", "missing field (needed to solve)");

  const Pencil<T> pencil(d.F, d.G);
  if (!check_regular(pencil, opts.tol, err)) return kIrregularPencil;
  const auto w = decompose(pencil, opts.tol);
  const DescriptorSystem<T> sys(d.F, d.G, d.B, d.C, opts.tol);
  const auto tin = transform_input(w, d.B);
  const InputSignal<T> input{d.k0, d.inputs};

  const auto needed = *horizon + static_cast<long>(w.q_star) - 1;
  if (needed > input.last_index()) {
    err << "error: input horizon too short: solving to K=" << *horizon << " with q_star=" << w.q_star
        << " needs V_" << d.k0 << " .. V_" << needed << ", file has " << input.samples.size() << " samples\n";
    return kInputHorizonTooShort;
  }
  const auto cons = check_consistency(sys, w, tin, input, *d.Y0, opts.tol);
  if (!cons.consistent) {
    err << "error: initial condition Y0 is inconsistent; Y0 - Q_p Zp - Q D_k0 =\n";
    print_matrix(err, cons.residual.transpose());
    return kInconsistentInitialCondition;
  }

  const auto traj = solve(sys, w, tin, input, *d.Y0, *horizon, opts.tol);
  const auto residual = residual_oracle(sys, input, traj, *d.Y0);

  std::ostream* summary = &out;
  if (opts.csv_path.empty()) {
    write_trajectory_csv(out, traj);
    summary = &err;
  } else {
    std::ofstream csv(opts.csv_path, std::ios::binary);
    if (!csv) throw ParseError("--out-csv", "cannot write '" + opts.csv_path + "'");
    write_trajectory_csv(csv, traj);
    out << "wrote " << traj.states.size() << " rows to " << opts.csv_path << "\n";
  }
  *summary << "residual: max |F Y_{k+1} - G Y_k - B V_k| = " << format_double(residual.max_step_residual)
           << ", |Y_k0 - Y0| = " << format_double(residual.initial_mismatch);
  if constexpr (ScalarTraits<T>::exact) *summary << (residual.exact_zero ? " (exactly zero)" : " (NONZERO)");
  *summary << "\n";
  return kOk;
}

template <FieldScalar T>
int causality_command(const SystemData<T>& d, const Options& opts, std::ostream& out, std::ostream& err) {
  const Pencil<T> pencil(d.F, d.G);
  if (!check_regular(pencil, opts.tol, err)) return kIrregularPencil;
  const auto w = decompose(pencil, opts.tol);
  const DescriptorSystem<T> sys(d.F, d.G, d.B, d.C, opts.tol);
  const auto tin = transform_input(w, d.B);
  const auto report = analyze_causality(sys, w, tin, opts.tol);

  nlohmann::json json_report = to_json(report);
  if (!opts.json) print_causality(out, report);
  if (opts.oracle_trials <= 0) {
    if (opts.json) out << json_report.dump(2) << "\n";
    return kOk;
  }

  const long horizon = opts.oracle_horizon ? *opts.oracle_horizon : static_cast<long>(w.q_star) + 5;
  const std::uint64_t seed = oracle_seed();
  std::mt19937_64 rng(seed);
  const auto state = brute_force_causality_oracle(sys, w, tin, CausalityMode::State, horizon, opts.oracle_trials,
                                                  rng, opts.tol);
  const auto output = brute_force_causality_oracle(sys, w, tin, CausalityMode::Output, horizon,
                                                   opts.oracle_trials, rng, opts.tol);
  const bool agrees = state.causal == report.state_input_causal && output.causal == report.output_input_causal;
  json_report["oracle"] = {{"trials", opts.oracle_trials},
                           {"horizon", horizon},
                           {"seed", seed},
                           {"state_causal", state.causal},
                           {"output_causal", output.causal},
                           {"agrees", agrees}};
  if (opts.json) {
    out << json_report.dump(2) << "\n";
  } else {
    out << "oracle (" << opts.oracle_trials << " trials, horizon " << horizon << ", seed " << seed
        << "): " << (agrees ? "agrees" : "DISAGREES") << "\n";
  }
  if (agrees) return kOk;

  for (const auto* result : {&state, &output}) {
    const bool is_state = result == &state;
    const bool verdict = is_state ? report.state_input_causal : report.output_input_causal;
    if (result->causal == verdict) continue;
    err << "error: " << (is_state ? "state" : "output") << " oracle says "
        << (result->causal ? "CAUSAL" : "NON-CAUSAL") << ", criterion says "
        << (verdict ? "CAUSAL" : "NON-CAUSAL") << "\n";
    if (result->counterexample) {
      const auto& ce = *result->counterexample;
      err << "  responses differ at k=" << ce.time << " after changing only V_" << ce.perturbed_index << "\n";
      print_vector_row(err, "Zp_k0", ce.zp0);
      print_signal(err, "U ", ce.first);
      print_signal(err, "U'", ce.second);
      print_vector_row(err, "response(U) ", ce.response_first);
      print_vector_row(err, "response(U')", ce.response_second);
    } else {
      err << "  no distinguishing input pair found in " << result->trials << " trials\n";
    }
  }
  return kOracleDisagreement;
}

template <class Fn>
int dispatch(const Options& opts, Fn&& fn) {
  std::optional<Mode> mode;
  if (opts.mode == "exact") mode = Mode::Exact;
  if (opts.mode == "float") mode = Mode::Float;
  const SystemFile file = load_system_file(opts.file, mode);
  return std::visit([&](const auto& data) { return fn(data); }, file.data);
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return kParseError;
    case ErrorKind::IrregularPencil: return kIrregularPencil;
    case ErrorKind::InconsistentInitialCondition: return kInconsistentInitialCondition;
    case ErrorKind::UnresolvableSpectrum: return kUnresolvableSpectrum;
    case ErrorKind::InputHorizonTooShort: return kInputHorizonTooShort;
    case ErrorKind::ChainConstructionFailure: return kChainConstructionFailure;
  }
  return kParseError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analysis of singular linear discrete-time (descriptor) systems", "dkit"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", opts.file, "System description (JSON)")->required();
    cmd->add_option("--mode", opts.mode, "Override the file's scalar mode")
        ->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--tol", opts.tol.zero_rel, "Relative zero test for det(sF - G) (float mode)");
    cmd->add_option("--rank-tol", opts.tol.rank_rel, "Relative singular threshold for rank decisions (float mode)");
    cmd->add_option("--cluster-radius", opts.tol.cluster_radius, "Root clustering radius (float mode)");
    cmd->add_option("--causality-tol", opts.tol.causality, "Zero threshold for causality witnesses (float mode)");
    cmd->add_flag("--json", opts.json, "Print machine-readable JSON instead of text");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "Regularity, Weierstrass form, consistency and causality");
  add_common(analyze_cmd);
  analyze_cmd->add_option("--report", opts.report_path, "Also write the JSON report to this path");

  auto* solve_cmd = app.add_subcommand("solve", "Closed-form trajectory as CSV");
  add_common(solve_cmd);
  solve_cmd->add_option("--K", opts.horizon, "Final time index (defaults to the file's K)");
  solve_cmd->add_option("--out-csv", opts.csv_path, "Write the CSV here instead of stdout");

  auto* causality_cmd = app.add_subcommand("causality", "State-input and output-input causality");
  add_common(causality_cmd);
  causality_cmd->add_option("--oracle-trials", opts.oracle_trials, "Cross-check with N brute-force trials")
      ->check(CLI::NonNegativeNumber);
  causality_cmd->add_option("--oracle-horizon", opts.oracle_horizon, "Oracle horizon (default q_star + 5)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (analyze_cmd->parsed())
      return dispatch(opts, [&](const auto& d) { return analyze(d, opts, out, err); });
    if (solve_cmd->parsed())
      return dispatch(opts, [&](const auto& d) { return solve_command(d, opts, out, err); });
    return dispatch(opts, [&](const auto& d) { return causality_command(d, opts, out, err); });
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
}

}  // namespace dkit::cli
