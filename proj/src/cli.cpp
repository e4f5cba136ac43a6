#include "daeref/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "daeref/certificates.hpp"
#include "daeref/conversion.hpp"
#include "daeref/descriptor.hpp"
#include "daeref/error.hpp"
#include "daeref/io.hpp"
#include "daeref/reduction.hpp"
#include "daeref/refinement.hpp"
#include "daeref/simulation.hpp"

namespace daeref {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw UsageError(flag + ": cannot parse number '" + cell + "'");
    }
    if (cell.find_first_not_of(" \t", used) != std::string::npos) {
      throw UsageError(flag + ": cannot parse number '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

Vec parse_vector(const std::string& text, const std::string& flag) {
  const std::vector<double> vals = parse_numbers(text, flag);
  return Eigen::Map<const Vec>(vals.data(), static_cast<Index>(vals.size()));
}

// "a,b;c,d" → 2×2, rows separated by ';'.
Mat parse_matrix(const std::string& text, const std::string& flag) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_numbers(row, flag));
  if (rows.empty()) return Mat();
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw UsageError(flag + ": ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Json vector_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

struct GlobalOptions {
  double tol = 0.0;
  std::string lambda_grid;

  RankTolerance rank_tol() const { return tol > 0.0 ? RankTolerance(tol) : RankTolerance(); }
  std::vector<double> grid() const {
    return lambda_grid.empty() ? default_lambda_grid() : parse_numbers(lambda_grid, "--lambda-grid");
  }
};

// DV view of a system file of either kind.
DvSystem load_dv(const std::string& path, const GlobalOptions& g) {
  const Json doc = read_json_file(path);
  const std::string kind = document_kind(doc);
  if (kind == "dv") return dv_from_json(doc);
  if (kind == "dae") return dae_to_dv(dae_from_json(doc).sys, g.rank_tol());
  throw Error(ErrorKind::InvalidSystemFile, path + " is neither a dae nor a dv document");
}

DaeSystem load_dae(const std::string& path) {
  return dae_from_json(read_json_file(path)).sys;
}

void emit(std::ostream& out, const Json& report, const std::string& path) {
  out << report.dump(2) << '\n';
  if (!path.empty()) write_json_file(path, report);
}

Json check_report(const DaeSystem& sys, const GlobalOptions& g) {
  Json report;
  report["n"] = sys.n();
  report["p"] = sys.p();
  report["k"] = sys.k();
  report["full_rank_io"] = sys.has_full_rank_io(g.rank_tol());
  const PencilRegularity reg = is_regular(sys.E, sys.A);
  report["regular"] = reg.regular;
  report["characteristic_coefficients"] = vector_json(reg.coefficients);
  if (!reg.regular) return report;
  const WeierstrassForm w = weierstrass(sys);
  const ReachabilityReport reach = check_reachability(w, g.rank_tol());
  report["n1"] = w.n1;
  report["n2"] = w.n2;
  report["index"] = w.mu;
  report["reachable"] = reach.reachable;
  report["rank_causal"] = reach.rank_causal;
  report["rank_anticausal"] = reach.rank_anticausal;
  return report;
}

Mat relation_or_identity(const std::string& text, Index n, Index m) {
  if (!text.empty()) return parse_matrix(text, "--relation");
  if (n != m) throw UsageError("--relation is required when state dimensions differ");
  return Mat::Identity(n, m);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Control refinement for discrete-time descriptor systems", "daeref"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--tol", g.tol, "relative rank tolerance")->check(CLI::PositiveNumber);
  app.add_option("--lambda-grid", g.lambda_grid, "comma-separated contraction rates");

  std::string input;
  std::string out_path;
  std::string to;
  std::string concrete_path;
  std::string abstract_path;
  std::string controller_path;
  std::string mode;
  std::string relation;
  std::string gain_text;
  std::string x0_text;
  std::string z0_text;
  std::string input_kind = "gain";
  std::string input_file;
  std::string method = "kron";
  Index order = 1;
  Index horizon = 50;
  std::uint64_t seed = 1;
  double bound = 0.3;

  auto* check = app.add_subcommand("check", "regularity, index and reachability of a DAE");
  check->add_option("system", input, "DAE document")->required();
  check->add_option("--out", out_path, "report path");

  auto* convert = app.add_subcommand("convert", "DAE ↔ DV conversion");
  convert->add_option("system", input, "DAE or DV document")->required();
  convert->add_option("--to", to, "target kind")->required()->check(CLI::IsMember({"dv", "dae"}));
  convert->add_option("--out", out_path, "output document");

  auto* certify = app.add_subcommand("certify", "simulation-function certificate");
  certify->add_option("--concrete", concrete_path, "concrete DAE or DV")->required();
  certify->add_option("--abstract", abstract_path, "abstract DAE or DV (default: concrete)");
  certify->add_option("--method", method, "Sylvester solver")->check(CLI::IsMember({"kron", "rq"}));
  certify->add_option("--out", out_path, "certificate document");

  auto* reduce = app.add_subcommand("reduce", "stabilize and balance-truncate");
  reduce->add_option("system", input, "DAE or DV document")->required();
  reduce->add_option("--order", order, "reduced order")->required()->check(CLI::PositiveNumber);
  reduce->add_option("--out", out_path, "abstract DAE document");

  auto* refine = app.add_subcommand("refine", "refine an abstract controller");
  refine->add_option("--concrete", concrete_path, "concrete DAE")->required();
  refine->add_option("--abstract", abstract_path, "abstract DAE (exact mode)");
  refine->add_option("--controller", controller_path, "abstract controller")->required();
  refine->add_option("--mode", mode, "exact or approx")->required()->check(CLI::IsMember({"exact", "approx"}));
  refine->add_option("--relation", relation, "relation map H as 'a,b;c,d' (exact mode)");
  refine->add_option("--gain", gain_text, "interface gain K as 'a,b;c,d' (exact mode)");
  refine->add_option("--order", order, "abstraction order (approx mode)")->check(CLI::PositiveNumber);
  refine->add_option("--x0", x0_text, "concrete initial state (approx mode)");
  refine->add_option("--horizon", horizon, "horizon for v_max (approx mode)")->check(CLI::NonNegativeNumber);
  refine->add_option("--method", method, "Sylvester solver")->check(CLI::IsMember({"kron", "rq"}));
  refine->add_option("--out", out_path, "refined controller document");

  auto* simulate = app.add_subcommand("simulate", "simulate a DV system or a refined closed loop");
  simulate->add_option("--system", input, "DAE or DV document (open simulation)");
  simulate->add_option("--concrete", concrete_path, "concrete DAE (closed loop)");
  simulate->add_option("--controller", controller_path, "refined controller (closed loop)");
  simulate->add_option("--horizon", horizon, "number of steps")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", seed, "seed for random inputs");
  simulate->add_option("--bound", bound, "bound for random inputs")->check(CLI::NonNegativeNumber);
  simulate->add_option("--input", input_kind, "input source")->check(CLI::IsMember({"file", "random", "gain"}));
  simulate->add_option("--input-file", input_file, "JSON array of input samples");
  simulate->add_option("--gain", gain_text, "input gain as 'a,b;c,d'");
  simulate->add_option("--x0", x0_text, "initial state");
  simulate->add_option("--z0", z0_text, "initial co-state (closed loop)");
  simulate->add_option("--out", out_path, "CSV trace path");

  auto* pipeline = app.add_subcommand("pipeline", "abstraction pipeline with certificate");
  pipeline->add_option("--concrete", concrete_path, "concrete DAE")->required();
  pipeline->add_option("--order", order, "abstraction order")->required()->check(CLI::PositiveNumber);
  pipeline->add_option("--method", method, "Sylvester solver")->check(CLI::IsMember({"kron", "rq"}));
  pipeline->add_option("--controller", controller_path, "abstract controller to refine");
  pipeline->add_option("--x0", x0_text, "concrete initial state");
  pipeline->add_option("--horizon", horizon, "horizon for v_max")->check(CLI::NonNegativeNumber);
  pipeline->add_option("--out", out_path, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  const SylvesterMethod sylvester_method =
      method == "rq" ? SylvesterMethod::Rq : SylvesterMethod::Kronecker;

  try {
    if (check->parsed()) {
      emit(out, check_report(load_dae(input), g), out_path);
    } else if (convert->parsed()) {
      const Json doc = read_json_file(input);
      const std::string kind = document_kind(doc);
      Json result;
      if (to == "dv") {
        result = kind == "dv" ? doc : dv_to_json(dae_to_dv(dae_from_json(doc).sys, g.rank_tol()));
      } else {
        const DvSystem dv = kind == "dv" ? dv_from_json(doc)
                                         : dae_to_dv(dae_from_json(doc).sys, g.rank_tol());
        const DaeFromDv back = dv_to_dae(dv, g.rank_tol());
        result = dae_to_json(back.dae, &back.recovery);
      }
      emit(out, result, out_path);
    } else if (certify->parsed()) {
      const DvSystem concrete = load_dv(concrete_path, g);
      const DvSystem abstract_dv = abstract_path.empty() ? concrete : load_dv(abstract_path, g);
      const StabilityCert stab =
          solve_stability_cert(concrete.Ad, concrete.Bd, concrete.C, g.grid());
      const SylvesterSolution syl = solve_sylvester(sylvester_method, concrete.Ad, concrete.Bd,
                                                    concrete.C, abstract_dv.Ad, abstract_dv.C);
      emit(out, certificate_to_json(assemble_certificate(concrete, abstract_dv, stab, syl)),
           out_path);
    } else if (reduce->parsed()) {
      const DvSystem dv = load_dv(input, g);
      const StabilizedDv stab = stabilize_dv(dv, g.grid());
      const TruncationResult trunc = balanced_truncation(stab.dv, order);
      const DaeFromDv back = dv_to_dae(trunc.reduced, g.rank_tol());
      Json doc = dae_to_json(back.dae, &back.recovery);
      doc["metadata"]["hankel_singular_values"] = vector_json(trunc.hankel);
      doc["metadata"]["stabilizing_gain"] = matrix_to_json(stab.K);
      emit(out, doc, out_path);
    } else if (refine->parsed()) {
      const DaeSystem concrete = load_dae(concrete_path);
      const DaeController ctrl = controller_from_json(read_json_file(controller_path));
      if (mode == "exact") {
        if (abstract_path.empty()) throw UsageError("--abstract is required in exact mode");
        const DaeSystem abstract_sys = load_dae(abstract_path);
        ExactRefineOptions opts;
        opts.relation = relation_or_identity(relation, concrete.n(), abstract_sys.n());
        if (!gain_text.empty()) opts.gain = parse_matrix(gain_text, "--gain");
        const ExactRefinement res = exact_refine(concrete, abstract_sys, ctrl, opts);
        Json doc = refined_to_json(res.controller);
        doc["metadata"]["lifted_gain"] = matrix_to_json(res.T);
        emit(out, doc, out_path);
      } else {
        if (x0_text.empty()) throw UsageError("--x0 is required in approx mode");
        PipelineOptions popts;
        popts.order = order;
        popts.lambda_grid = g.grid();
        popts.sylvester = sylvester_method;
        const AbstractionPipelineResult abs = build_abstraction_pipeline(concrete, popts);
        const ApproxRefinement res =
            approx_refine(concrete, abs, ctrl, parse_vector(x0_text, "--x0"), horizon);
        Json doc = refined_to_json(res.controller);
        doc["metadata"]["epsilon"] = res.epsilon;
        doc["metadata"]["v_max"] = res.v_max;
        doc["metadata"]["z0"] = vector_json(res.z0);
        doc["metadata"]["lifted_gain"] = matrix_to_json(res.T);
        emit(out, doc, out_path);
      }
    } else if (simulate->parsed()) {
      Json report;
      Trace trace;
      if (!controller_path.empty()) {
        if (concrete_path.empty()) throw UsageError("--concrete is required with --controller");
        const DaeSystem concrete = load_dae(concrete_path);
        const RefinedController ctrl = refined_from_json(read_json_file(controller_path));
        const Vec x0 = x0_text.empty() ? Vec::Zero(concrete.n()) : parse_vector(x0_text, "--x0");
        const Vec z0 = z0_text.empty() ? Vec(pinv(ctrl.P) * x0) : parse_vector(z0_text, "--z0");
        const ClosedRun run = simulate_dae_closed(concrete, ctrl, x0, z0, horizon);
        trace = run.concrete_trace;
        report["max_output_distance"] = run.max_distance;
      } else {
        if (input.empty()) throw UsageError("--system or --controller is required");
        const DvSystem dv = load_dv(input, g);
        const Vec x0 = x0_text.empty() ? Vec::Zero(dv.n()) : parse_vector(x0_text, "--x0");
        InputSource source;
        if (input_kind == "random") {
          source = InputSource::random(seed, bound);
        } else if (input_kind == "file") {
          if (input_file.empty()) throw UsageError("--input-file is required with --input file");
          const Json samples = read_json_file(input_file);
          const Mat rows = matrix_from_json(samples, "input samples");
          std::vector<Vec> sig;
          for (Index t = 0; t < rows.rows(); ++t) sig.push_back(rows.row(t).transpose());
          source = InputSource::from_signal(std::move(sig));
        } else {
          source = InputSource::from_gain(gain_text.empty() ? Mat() : parse_matrix(gain_text, "--gain"));
        }
        trace = simulate_dv(dv, x0, source, horizon);
      }
      report["horizon"] = trace.horizon();
      if (trace.horizon() > 0) report["final_output"] = vector_json(trace.y.row(trace.horizon() - 1).transpose());
      if (!out_path.empty()) {
        export_trace(trace, out_path);
        report["trace"] = out_path;
      }
      out << report.dump(2) << '\n';
    } else if (pipeline->parsed()) {
      const DaeSystem concrete = load_dae(concrete_path);
      PipelineOptions popts;
      popts.order = order;
      popts.lambda_grid = g.grid();
      popts.sylvester = sylvester_method;
      AbstractionPipelineResult abs = build_abstraction_pipeline(concrete, popts);
      Json report;
      report["order"] = order;
      report["hankel_singular_values"] = vector_json(abs.hankel);
      report["lambda"] = abs.cert.stability.lambda;
      report["gamma_coeff"] = abs.cert.gamma_coeff;
      std::optional<ApproxRefinement> refined;
      if (!controller_path.empty()) {
        if (x0_text.empty()) throw UsageError("--x0 is required with --controller");
        const DaeController ctrl = controller_from_json(read_json_file(controller_path));
        refined = approx_refine(concrete, abs, ctrl, parse_vector(x0_text, "--x0"), horizon);
        abs.cert = refined->cert;
        report["epsilon"] = refined->epsilon;
        report["v_max"] = refined->v_max;
        report["z0"] = vector_json(refined->z0);
      }
      if (!out_path.empty()) {
        const std::filesystem::path dir(out_path);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + out_path);
        write_json_file((dir / "concrete_dv.json").string(), dv_to_json(abs.dv_concrete));
        write_json_file((dir / "abstract_dv.json").string(), dv_to_json(abs.dv_abstract));
        write_json_file((dir / "abstract_dae.json").string(),
                        dae_to_json(abs.dae_abstract, &abs.recovery_abstract));
        write_json_file((dir / "certificate.json").string(), certificate_to_json(abs.cert));
        if (refined) {
          write_json_file((dir / "refined_controller.json").string(),
                          refined_to_json(refined->controller));
        }
        write_json_file((dir / "report.json").string(), report);
      }
      out << report.dump(2) << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    Json j;
    j["error"] = std::string(to_string(e.kind()));
    j["message"] = e.what();
    err << j.dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace daeref
