// Command line driver: single-vertex flows, Bloch-vector denoising, patch
// smoothing, the commutative restriction check and potential traces.

#include "qsaf/qsaf.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using qsaf::io::Json;

constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct CommonOptions {
  double eps = 0.1;
  double purity_tol = 1e-3;
  int max_iters = 10000;
  int record_every = 10;
  double tau = 1.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string weights = "uniform";
  std::string out_dir = ".";
  bool allow_partial = false;
  std::string config_path;

  qsaf::FlowConfig flow() const {
    qsaf::FlowConfig cfg;
    cfg.step_size = eps;
    cfg.purity_tol = purity_tol;
    cfg.max_iters = max_iters;
    cfg.record_every = record_every;
    cfg.trace_scale = tau;
    cfg.threads = threads;
    return cfg;
  }
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--eps", opt.eps, "integrator step size (<= 0.5)");
  cmd->add_option("--purity-tol", opt.purity_tol, "purity-gap convergence tolerance");
  cmd->add_option("--max-iters", opt.max_iters, "iteration cap");
  cmd->add_option("--record-every", opt.record_every, "trajectory snapshot stride");
  cmd->add_option("--tau", opt.tau, "trace scale of the states");
  cmd->add_option("--seed", opt.seed, "seed for any randomized input");
  cmd->add_option("--threads", opt.threads, "worker threads (results are thread-count independent)");
  cmd->add_option("--weights", opt.weights, "uniform | gaussian:<t>");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_flag("--allow-partial", opt.allow_partial,
                "exit 0 even if the flow did not converge");
  cmd->add_option("--config", opt.config_path, "JSON config file; flags win over file values");
}

// Values from the JSON config apply only where the flag was not given.
void apply_config_file(CLI::App* cmd, CommonOptions& opt) {
  if (opt.config_path.empty()) return;
  const Json j = qsaf::io::read_json(opt.config_path);
  auto take = [&](const char* flag, const char* key, auto& value) {
    if (cmd->count(flag) == 0 && j.contains(key)) value = j.at(key).get<std::decay_t<decltype(value)>>();
  };
  take("--eps", "eps", opt.eps);
  take("--purity-tol", "purity_tol", opt.purity_tol);
  take("--max-iters", "max_iters", opt.max_iters);
  take("--record-every", "record_every", opt.record_every);
  take("--tau", "tau", opt.tau);
  take("--seed", "seed", opt.seed);
  take("--threads", "threads", opt.threads);
  take("--weights", "weights", opt.weights);
  take("--out", "out", opt.out_dir);
}

std::optional<double> parse_gaussian_tau(const std::string& weights) {
  if (weights == "uniform") return std::nullopt;
  if (weights.rfind("gaussian:", 0) == 0) {
    const double t = std::stod(weights.substr(9));
    if (t < 0.0) throw CLI::ValidationError("--weights", "gaussian bandwidth must be >= 0");
    return t;
  }
  throw CLI::ValidationError("--weights", "expected uniform or gaussian:<t>");
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

Json config_echo(const std::string& command, const CommonOptions& opt) {
  // thread count and wall time stay out of the report: outputs must be
  // byte-identical for any worker count
  return Json{{"command", command},
              {"eps", opt.eps},
              {"purity_tol", opt.purity_tol},
              {"max_iters", opt.max_iters},
              {"record_every", opt.record_every},
              {"tau", opt.tau},
              {"seed", opt.seed},
              {"weights", opt.weights}};
}

std::string out_path(const CommonOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / name).string();
}

int finish(const CommonOptions& opt, bool converged) {
  if (!converged && !opt.allow_partial) {
    std::cerr << "flow did not converge within max-iters (use --allow-partial to accept)\n";
    return kExitNotConverged;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// single-vertex

int run_single_vertex(const CommonOptions& opt, const std::string& eigenvalues,
                      const std::string& classical_data, std::uint64_t basis_seed,
                      const std::string& matrix_file) {
  qsaf::FlowConfig cfg = opt.flow();

  if (!classical_data.empty()) {
    const auto data_vec = parse_double_list(classical_data);
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(data_vec.data(),
                                                          static_cast<Eigen::Index>(data_vec.size()));
    const auto res = qsaf::simplex::single_vertex_flow(d, cfg);

    // predicted limit: uniform mixture over the minimizing indices
    const double dmin = d.minCoeff();
    Eigen::VectorXd limit = Eigen::VectorXd::Zero(d.size());
    int hits = 0;
    for (Eigen::Index j = 0; j < d.size(); ++j)
      if (d(j) <= dmin + 1e-9) {
        limit(j) = 1.0;
        ++hits;
      }
    limit /= static_cast<double>(hits);
    const double dist = (res.trajectory.back() - limit).norm();

    std::ofstream csv(out_path(opt, "trajectory.csv"));
    csv << "iter";
    for (Eigen::Index j = 0; j < d.size(); ++j) csv << ",p_" << j + 1;
    csv << "\n";
    for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
      csv << res.recorded_iters[k];
      for (Eigen::Index j = 0; j < d.size(); ++j)
        csv << "," << qsaf::io::format_double(res.trajectory[k](j));
      csv << "\n";
    }

    Json report = config_echo("single-vertex", opt);
    report["mode"] = "classical";
    report["iterations"] = res.iterations;
    report["converged"] = res.converged;
    report["limit_distance"] = dist;
    qsaf::io::write_json(report, out_path(opt, "report.json"));
    std::cout << "limit distance " << dist << " after " << res.iterations << " iterations\n";
    return finish(opt, res.converged);
  }

  qsaf::CMatrix dmat;
  if (!matrix_file.empty()) {
    dmat = qsaf::io::matrix_from_json(qsaf::io::read_json(matrix_file));
  } else {
    if (eigenvalues.empty())
      throw CLI::ValidationError("single-vertex",
                                 "need --eigenvalues, --matrix or --classical-data");
    const auto lam = parse_double_list(eigenvalues);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(lam.data(),
                                                          static_cast<Eigen::Index>(lam.size()));
    dmat = v.cast<qsaf::Complex>().asDiagonal();
    if (basis_seed != 0) {
      qsaf::Rng rng(basis_seed);
      const qsaf::CMatrix u = rng.unitary(v.size());
      dmat = u * dmat * u.adjoint();
    }
  }
  const qsaf::HermitianMatrix data(dmat);
  const auto res = qsaf::sqsaf_integrate(data, cfg);

  // predicted limit: projector onto the eigenvector(s) of the minimal eigenvalue
  const auto sd = qsaf::spectral_decompose(data);
  const double lmin = sd.eigenvalues.minCoeff();
  qsaf::CMatrix projector = qsaf::CMatrix::Zero(data.dim(), data.dim());
  int hits = 0;
  for (Eigen::Index j = 0; j < data.dim(); ++j)
    if (sd.eigenvalues(j) <= lmin + 1e-9) {
      projector += sd.eigenvectors.col(j) * sd.eigenvectors.col(j).adjoint();
      ++hits;
    }
  projector *= cfg.trace_scale / static_cast<double>(hits);
  const double dist = (res.finalState().matrix() - projector).norm();

  std::ofstream csv(out_path(opt, "trajectory.csv"));
  csv << "iter";
  for (Eigen::Index j = 0; j < data.dim(); ++j) csv << ",lambda_" << j + 1;
  csv << "\n";
  for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
    csv << res.recorded_iters[k];
    for (Eigen::Index j = 0; j < data.dim(); ++j)
      csv << "," << qsaf::io::format_double(res.trajectory[k].eigenvalues()(j));
    csv << "\n";
  }
  qsaf::io::write_json(qsaf::io::matrix_to_json(res.finalState().matrix()),
                       out_path(opt, "final_state.json"));

  Json report = config_echo("single-vertex", opt);
  report["mode"] = "density";
  report["iterations"] = res.iterations;
  report["converged"] = res.converged;
  report["limit_distance"] = dist;
  report["final_purity_gap"] = res.finalState().purityGap();
  qsaf::io::write_json(report, out_path(opt, "report.json"));
  std::cout << "limit distance " << dist << " after " << res.iterations << " iterations\n";
  return finish(opt, res.converged);
}

// ---------------------------------------------------------------------------
// bloch-denoise

int run_bloch_denoise(CLI::App* cmd, const CommonOptions& opt, const std::string& input,
                      const std::string& synthetic, double noise_sigma) {
  qsaf::FlowConfig cfg = opt.flow();
  if (cmd->count("--purity-tol") == 0)
    cfg.purity_tol = qsaf::experiments::bloch_purity_tol();  // min ||d|| >= 0.999 rule

  int width = 0, height = 0;
  std::vector<Eigen::Vector3d> field;
  if (!synthetic.empty()) {
    const auto x = synthetic.find('x');
    if (x == std::string::npos)
      throw CLI::ValidationError("--synthetic", "expected <width>x<height>");
    width = std::stoi(synthetic.substr(0, x));
    height = std::stoi(synthetic.substr(x + 1));
    const auto synth = qsaf::experiments::make_quadrant_bloch(width, height, noise_sigma,
                                                               opt.seed);
    field = synth.noisy;
    qsaf::io::write_image(qsaf::experiments::bloch_to_image(synth.noisy, width, height),
                          out_path(opt, "input_noisy.png"));
    qsaf::io::write_image(qsaf::experiments::bloch_to_image(synth.clean, width, height),
                          out_path(opt, "input_clean.png"));
  } else {
    if (input.empty()) throw CLI::ValidationError("bloch-denoise", "need --input or --synthetic");
    const auto img = qsaf::io::read_image(input);
    width = img.width;
    height = img.height;
    field = qsaf::experiments::image_to_bloch(img);
  }

  const auto gaussian_tau = parse_gaussian_tau(opt.weights);
  const auto outcome = qsaf::experiments::bloch_denoise(field, width, height, cfg, gaussian_tau);

  qsaf::io::write_image(qsaf::experiments::bloch_to_image(outcome.decoded, width, height),
                        out_path(opt, "denoised.png"));
  qsaf::io::write_diagnostics_csv(outcome.flow.diagnostics, out_path(opt, "diagnostics.csv"));

  Json report = config_echo("bloch-denoise", opt);
  report["noise_sigma"] = noise_sigma;
  report["width"] = width;
  report["height"] = height;
  report["iterations"] = outcome.flow.iterations;
  report["converged"] = outcome.flow.converged;
  report["min_bloch_norm"] = outcome.min_norm;
  report["final_purity_gap"] = outcome.flow.diagnostics.back().purity_gap_max;
  qsaf::io::write_json(report, out_path(opt, "report.json"));
  std::cout << "min Bloch norm " << outcome.min_norm << " after " << outcome.flow.iterations
            << " iterations\n";
  return finish(opt, outcome.flow.converged);
}

// ---------------------------------------------------------------------------
// patch-smooth

int run_patch_smooth(const CommonOptions& opt, const std::string& input, int patch_size,
                     const std::string& encoder, const std::string& adjacency, int knn) {
  if (input.empty()) throw CLI::ValidationError("patch-smooth", "need --input");
  qsaf::experiments::PatchSmoothParams params;
  params.side = patch_size;
  params.flow = opt.flow();
  params.gaussian_tau = parse_gaussian_tau(opt.weights);
  params.knn = knn;
  if (encoder == "rank1") {
    params.encoder = qsaf::experiments::PatchEncoder::kRankOne;
  } else if (encoder == "fourier") {
    params.encoder = qsaf::experiments::PatchEncoder::kFourier;
  } else {
    throw CLI::ValidationError("--encoder", "expected rank1 or fourier");
  }
  if (adjacency == "grid") {
    params.adjacency = qsaf::experiments::PatchAdjacency::kGrid;
  } else if (adjacency == "knn") {
    params.adjacency = qsaf::experiments::PatchAdjacency::kNearestPatches;
  } else {
    throw CLI::ValidationError("--adjacency", "expected grid or knn");
  }

  const auto img = qsaf::io::read_image(input);
  const auto outcome = qsaf::experiments::patch_smooth(qsaf::experiments::image_to_gray(img), params);

  qsaf::io::write_image(qsaf::experiments::gray_to_image(outcome.output_gray),
                        out_path(opt, "smoothed.png"));
  qsaf::io::write_diagnostics_csv(outcome.flow.diagnostics, out_path(opt, "diagnostics.csv"));

  Json report = config_echo("patch-smooth", opt);
  report["patch_size"] = patch_size;
  report["encoder"] = encoder;
  report["adjacency"] = adjacency;
  report["patches"] = static_cast<int>(outcome.input.patches.size());
  report["skipped_zero_patches"] = outcome.skipped;
  report["iterations"] = outcome.flow.iterations;
  report["converged"] = outcome.flow.converged;
  report["final_purity_gap"] = outcome.flow.diagnostics.back().purity_gap_max;
  qsaf::io::write_json(report, out_path(opt, "report.json"));
  std::cout << outcome.input.patches.size() << " patches (" << outcome.skipped
            << " skipped), " << outcome.flow.iterations << " iterations\n";
  return finish(opt, outcome.flow.converged);
}

// ---------------------------------------------------------------------------
// restrict-check

int run_restrict_check(const CommonOptions& opt, int c, const std::string& grid,
                       bool non_commuting) {
  const auto x = grid.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--grid", "expected <rows>x<cols>");
  const int rows = std::stoi(grid.substr(0, x));
  const int cols = std::stoi(grid.substr(x + 1));

  qsaf::FlowConfig cfg = opt.flow();
  cfg.record_every = 1;  // per-iterate comparison

  const qsaf::WeightedGraph g = qsaf::WeightedGraph::Grid(rows, cols);
  const int n = g.vertexCount();

  qsaf::Rng rng(opt.seed);
  const qsaf::CMatrix u = (opt.seed == 0) ? qsaf::CMatrix::Identity(c, c) : rng.unitary(c);
  std::vector<qsaf::RVector> lambdas;
  lambdas.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    qsaf::RVector lam(c);
    for (int j = 0; j < c; ++j) lam(j) = rng.uniform(-1.0, 1.0);
    lambdas.push_back(lam);
  }
  auto data = qsaf::commuting_dataset(u, lambdas);
  if (non_commuting) {
    // negative control: conjugate every second matrix by its own basis
    for (int i = 0; i < n; i += 2) {
      const qsaf::CMatrix v = rng.unitary(c);
      data[static_cast<std::size_t>(i)] = qsaf::HermitianMatrix(
          v * data[static_cast<std::size_t>(i)].matrix() * v.adjoint());
    }
  }

  const auto mu_res = qsaf::mu_flow_integrate(
      g, qsaf::initial_similarity_state(g, data, cfg.trace_scale), cfg);

  Eigen::MatrixXd lam_rows(n, c);
  for (int i = 0; i < n; ++i) lam_rows.row(i) = lambdas[static_cast<std::size_t>(i)].transpose();
  const auto s0 = qsaf::simplex::similarity(
      qsaf::simplex::AssignmentMatrix::Barycenter(n, c), lam_rows, g);
  const auto s_res = qsaf::simplex::s_flow_integrate(s0, g, cfg);

  const std::size_t steps = std::min(mu_res.trajectory.size(), s_res.trajectory.size());
  double deviation = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    for (int i = 0; i < n; ++i) {
      const qsaf::CMatrix embedded =
          u *
          qsaf::CMatrix(cfg.trace_scale * s_res.trajectory[t].row(i).transpose()
                            .cast<qsaf::Complex>()
                            .asDiagonal()) *
          u.adjoint();
      deviation = std::max(deviation,
                           (mu_res.trajectory[t][i].matrix() - embedded).norm());
    }
  }

  Json report = config_echo("restrict-check", opt);
  report["c"] = c;
  report["grid"] = grid;
  report["non_commuting"] = non_commuting;
  report["steps_compared"] = static_cast<int>(steps);
  report["max_deviation"] = deviation;
  qsaf::io::write_json(report, out_path(opt, "report.json"));
  std::cout << "max per-iterate deviation " << deviation << " over " << steps << " steps\n";
  return 0;
}

// ---------------------------------------------------------------------------
// potential-trace

int run_potential_trace(const CommonOptions& opt, int c, const std::string& grid) {
  const auto x = grid.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--grid", "expected <rows>x<cols>");
  const int rows = std::stoi(grid.substr(0, x));
  const int cols = std::stoi(grid.substr(x + 1));

  const qsaf::FlowConfig cfg = opt.flow();
  // periodic grid keeps the uniform weights symmetric, so J is a Lyapunov-like trace
  const qsaf::WeightedGraph g = qsaf::WeightedGraph::Grid(rows, cols, 1, true);

  qsaf::Rng rng(opt.seed);
  std::vector<qsaf::DensityMatrix> states;
  states.reserve(static_cast<std::size_t>(g.vertexCount()));
  for (int i = 0; i < g.vertexCount(); ++i)
    states.push_back(rng.density(c, 1.0, cfg.trace_scale));

  const auto res = qsaf::mu_flow_integrate(g, qsaf::ProductState(std::move(states)), cfg);
  qsaf::io::write_diagnostics_csv(res.diagnostics, out_path(opt, "diagnostics.csv"));

  Json report = config_echo("potential-trace", opt);
  report["c"] = c;
  report["grid"] = grid;
  report["iterations"] = res.iterations;
  report["converged"] = res.converged;
  report["final_purity_gap"] = res.diagnostics.back().purity_gap_max;
  report["final_potential"] = res.diagnostics.back().potential;
  qsaf::io::write_json(report, out_path(opt, "report.json"));
  std::cout << "final potential " << res.diagnostics.back().potential << " after "
            << res.iterations << " iterations\n";
  return finish(opt, res.converged);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assignment flows on density-matrix state spaces over weighted graphs"};
  app.require_subcommand(1);

  CommonOptions opt_sv, opt_bloch, opt_patch, opt_restrict, opt_pot;

  auto* sv = app.add_subcommand("single-vertex", "integrate the single-vertex flows");
  add_common_options(sv, opt_sv);
  std::string sv_eigenvalues, sv_classical, sv_matrix;
  std::uint64_t sv_basis_seed = 0;
  sv->add_option("--eigenvalues", sv_eigenvalues, "comma list; data D = U diag(l) U^*");
  sv->add_option("--basis-seed", sv_basis_seed, "random unitary basis seed (0 = identity)");
  sv->add_option("--matrix", sv_matrix, "JSON file with an explicit Hermitian matrix");
  sv->add_option("--classical-data", sv_classical,
                 "comma list; run the simplex flow instead of the matrix flow");

  auto* bl = app.add_subcommand("bloch-denoise", "label 3D vectors on the Bloch ball");
  add_common_options(bl, opt_bloch);
  std::string bl_input, bl_synthetic;
  double bl_noise_sigma = 0.3;
  bl->add_option("--input", bl_input, "input image (png or ppm)");
  bl->add_option("--synthetic", bl_synthetic, "generate a <w>x<h> quadrant test image");
  bl->add_option("--noise-sigma", bl_noise_sigma, "noise level for --synthetic");

  auto* ps = app.add_subcommand("patch-smooth", "structure-preserving patch smoothing");
  add_common_options(ps, opt_patch);
  std::string ps_input, ps_encoder = "rank1", ps_adjacency = "grid";
  int ps_patch_size = 8, ps_knn = 8;
  ps->add_option("--input", ps_input, "input image (png or ppm)");
  ps->add_option("--patch-size", ps_patch_size, "patch side length");
  ps->add_option("--encoder", ps_encoder, "rank1 | fourier");
  ps->add_option("--adjacency", ps_adjacency, "grid | knn");
  ps->add_option("--knn", ps_knn, "neighbor count for --adjacency knn");

  auto* rc = app.add_subcommand("restrict-check",
                                "compare the matrix flow with the simplex flow on commuting data");
  add_common_options(rc, opt_restrict);
  int rc_c = 4;
  std::string rc_grid = "8x8";
  bool rc_non_commuting = false;
  rc->add_option("--c", rc_c, "state dimension");
  rc->add_option("--grid", rc_grid, "<rows>x<cols> grid");
  rc->add_flag("--non-commuting", rc_non_commuting, "negative control with mixed bases");

  auto* pt = app.add_subcommand("potential-trace",
                                "record the potential along a flow from random states");
  add_common_options(pt, opt_pot);
  int pt_c = 3;
  std::string pt_grid = "8x8";
  pt->add_option("--c", pt_c, "state dimension");
  pt->add_option("--grid", pt_grid, "<rows>x<cols> periodic grid");

  CLI11_PARSE(app, argc, argv);

  const auto started = std::chrono::steady_clock::now();
  int rc_code = 0;
  try {
    if (sv->parsed()) {
      apply_config_file(sv, opt_sv);
      rc_code = run_single_vertex(opt_sv, sv_eigenvalues, sv_classical, sv_basis_seed, sv_matrix);
    } else if (bl->parsed()) {
      apply_config_file(bl, opt_bloch);
      rc_code = run_bloch_denoise(bl, opt_bloch, bl_input, bl_synthetic, bl_noise_sigma);
    } else if (ps->parsed()) {
      apply_config_file(ps, opt_patch);
      rc_code = run_patch_smooth(opt_patch, ps_input, ps_patch_size, ps_encoder, ps_adjacency,
                                 ps_knn);
    } else if (rc->parsed()) {
      apply_config_file(rc, opt_restrict);
      rc_code = run_restrict_check(opt_restrict, rc_c, rc_grid, rc_non_commuting);
    } else if (pt->parsed()) {
      apply_config_file(pt, opt_pot);
      rc_code = run_potential_trace(opt_pot, pt_c, pt_grid);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  const auto elapsed = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - started);
  std::cout << "wall time " << elapsed.count() << " s\n";
  return rc_code;
}
