// Command line front end: simulate synthetic models, fit the estimator,
// sweep lambda paths and score support recovery with ROC/AUC.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include "lvglasso/em.hpp"
#include "lvglasso/errors.hpp"
#include "lvglasso/eval.hpp"
#include "lvglasso/glasso.hpp"
#include "lvglasso/matrix_io.hpp"
#include "lvglasso/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lvglasso;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct RunConfig {
  int p = 198;
  int h = 2;
  int n = 1000;
  std::uint64_t seed = 1;
  int r = 2;
  double lambda = 0.1;
  std::string lambda_grid;  // "min,max,count[,log]", empty = default grid
  double em_tol = 1e-5;
  int em_max_iter = 200;
  double zero_tol = 1e-6;
  double ridge = 1e-2;
  std::string in;
  std::string out_dir;
  bool svg = false;
};

EmConfig em_config_of(const RunConfig& cfg, int r) {
  EmConfig em;
  em.r = r;
  em.lambda = cfg.lambda;
  em.em_tol = cfg.em_tol;
  em.em_max_iter = cfg.em_max_iter;
  em.ridge = cfg.ridge;
  em.init_seed = cfg.seed;
  return em;
}

// Derived per-purpose seeds, recorded in every metadata file.
std::uint64_t graph_seed_of(std::uint64_t seed) { return seed; }
std::uint64_t value_seed_of(std::uint64_t seed) { return seed + 1; }
std::uint64_t data_seed_of(std::uint64_t seed) { return seed + 2; }

fs::path ensure_out_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw std::invalid_argument("--out-dir is required");
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
  if (!cfg.in.empty() && fs::weakly_canonical(fs::path(cfg.in), ec) ==
                             fs::weakly_canonical(dir, ec))
    throw std::invalid_argument("--in and --out-dir must be distinct paths");
  return dir;
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + file.string());
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open for reading: " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("cannot parse " + file.string() + ": " + e.what());
  }
  return j;
}

json config_json(const RunConfig& cfg, const std::string& command) {
  return json{{"command", command},
              {"p", cfg.p},
              {"h", cfg.h},
              {"n", cfg.n},
              {"seed", cfg.seed},
              {"r", cfg.r},
              {"lambda", cfg.lambda},
              {"lambda_grid", cfg.lambda_grid},
              {"em_tol", cfg.em_tol},
              {"em_max_iter", cfg.em_max_iter},
              {"zero_tol", cfg.zero_tol},
              {"ridge", cfg.ridge},
              {"in", cfg.in},
              {"out_dir", cfg.out_dir},
              {"svg", cfg.svg}};
}

std::vector<double> parse_lambda_grid(const std::string& spec, const SymMatrix& sigma) {
  double top = 0.0, bottom = 0.0;
  int count = 0;
  bool log_spaced = true;
  if (spec.empty()) {
    top = 0.5 * sigma.max_abs_offdiag();
    if (top <= 0.0) top = 0.5 * sigma.mat().diagonal().maxCoeff();
    bottom = 1e-3 * top;
    count = 40;
  } else {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (parts.size() < 3 || parts.size() > 4)
      throw std::invalid_argument("--lambda-grid expects min,max,count[,log]");
    log_spaced = parts.size() == 4;
    if (log_spaced && parts[3] != "log")
      throw std::invalid_argument("--lambda-grid: unknown spacing '" + parts[3] + "'");
    try {
      bottom = std::stod(parts[0]);
      top = std::stod(parts[1]);
      count = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("--lambda-grid: cannot parse '" + spec + "'");
    }
  }
  if (count < 1) throw std::invalid_argument("--lambda-grid: count must be >= 1");
  if (bottom < 0.0 || top < bottom)
    throw std::invalid_argument("--lambda-grid: need 0 <= min <= max");
  if (log_spaced && bottom <= 0.0)
    throw std::invalid_argument("--lambda-grid: log spacing needs min > 0");

  std::vector<double> lambdas;
  lambdas.reserve(count);
  if (count == 1) {
    lambdas.push_back(top);
    return lambdas;
  }
  for (int k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / (count - 1);
    lambdas.push_back(log_spaced ? top * std::pow(bottom / top, t)
                                 : top - t * (top - bottom));
  }
  // strictly descending, guard against duplicates from rounding
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] < lambdas[i - 1]))
      throw std::invalid_argument("--lambda-grid: grid is not strictly descending");
  return lambdas;
}

SymMatrix load_covariance(const fs::path& file) {
  const Eigen::MatrixXd m = read_matrix_csv(file);
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << file.string() << ": covariance must be square, got " << m.rows() << "x"
        << m.cols();
    throw std::invalid_argument(msg.str());
  }
  return SymMatrix::from_dense(m, 1e-8);
}

int numerical_rank(const SymMatrix& l) {
  if (l.dim() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l.mat(), Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-8 * top) ++rank;
  return rank;
}

json fit_summary(const EmFit& f, double zero_tol) {
  return json{{"lambda", f.lambda},
              {"iterations", f.iterations},
              {"converged", f.converged},
              {"objective", f.observed_objective_trace.empty()
                                ? json()
                                : json(f.observed_objective_trace.back())},
              {"nonzero_offdiag", f.S_hat.dim() ? support(f.S_hat, zero_tol).size() : 0},
              {"rank_L", numerical_rank(f.L_hat)}};
}

void write_roc_csv(const fs::path& file, const RocSeries& series) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out << "lambda,tp,fp,tn,fn,tpr,fpr\n";
  char buf[64];
  for (const RocPoint& pt : series.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%ld,%ld,%ld,%ld,%.17g,%.17g\n", pt.lambda,
                  pt.tp, pt.fp, pt.tn, pt.fn, pt.tpr, pt.fpr);
    out << buf;
  }
  out.flush();
  if (!out) throw IoError("write failed: " + file.string());
}

void write_roc_svg(const fs::path& file, const std::vector<std::pair<std::string, const RocSeries*>>& curves) {
  const double x0 = 60, y0 = 420, span = 360;
  std::ofstream out(file);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
         "viewBox=\"0 0 480 480\">\n"
      << "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n"
      << "<line x1=\"60\" y1=\"420\" x2=\"420\" y2=\"420\" stroke=\"black\"/>\n"
      << "<line x1=\"60\" y1=\"60\" x2=\"60\" y2=\"420\" stroke=\"black\"/>\n"
      << "<text x=\"220\" y=\"455\" font-size=\"14\">FPR</text>\n"
      << "<text x=\"15\" y=\"240\" font-size=\"14\" transform=\"rotate(-90 20 245)\">TPR</text>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
  int idx = 0;
  double legend_y = 80;
  for (const auto& [label, series] : curves) {
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, 0.0);
    for (const RocPoint& pt : series->points) pts.emplace_back(pt.fpr, pt.tpr);
    pts.emplace_back(1.0, 1.0);
    std::sort(pts.begin(), pts.end());
    out << "<polyline fill=\"none\" stroke=\"" << colors[idx % 3]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts)
      out << x0 + x * span << ',' << y0 - y * span << ' ';
    out << "\"/>\n";
    out << "<text x=\"300\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
        << colors[idx % 3] << "\">" << label << "</text>\n";
    legend_y += 18;
    ++idx;
  }
  out << "</svg>\n";
  out.flush();
  if (!out) throw IoError("write failed: " + file.string());
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.p < 2) throw std::invalid_argument("simulate: --p must be >= 2");
  if (cfg.h < 0) throw std::invalid_argument("simulate: --h must be >= 0");
  if (cfg.n < 2) throw std::invalid_argument("simulate: --n must be >= 2");
  const fs::path dir = ensure_out_dir(cfg);

  const GeometricGraph graph = generate_graph(cfg.p, graph_seed_of(cfg.seed));
  const GroundTruthModel model = build_precision(graph, cfg.h, value_seed_of(cfg.seed));
  const Dataset data = sample_data(model, cfg.n, data_seed_of(cfg.seed));

  write_matrix_csv(dir / "K_true.csv", model.K_true.mat());
  write_edges_csv(dir / "edges.csv", model.true_edges);
  write_matrix_csv(dir / "X.csv", data.X);
  write_matrix_csv(dir / "sigma_o_n.csv", data.sigma_o_n.mat());

  json meta = config_json(cfg, "simulate");
  meta["graph_seed"] = model.graph_seed;
  meta["value_seed"] = model.value_seed;
  meta["data_seed"] = data.source_seed;
  meta["diag_value"] = model.diag_value;
  meta["true_edge_count"] = model.true_edges.size();
  meta["files"] = {"K_true.csv", "edges.csv", "X.csv", "sigma_o_n.csv"};
  write_json(dir / "metadata.json", meta);

  std::cout << "simulated p=" << cfg.p << " h=" << cfg.h << " n=" << cfg.n
            << " true_edges=" << model.true_edges.size()
            << " diag_value=" << model.diag_value << " -> " << dir.string() << "\n";
  return kExitOk;
}

int cmd_fit(const RunConfig& cfg) {
  if (cfg.in.empty()) throw std::invalid_argument("fit: --in <sigma_o_n.csv> is required");
  const fs::path dir = ensure_out_dir(cfg);
  const SymMatrix sigma = load_covariance(cfg.in);

  EmConfig em = em_config_of(cfg, cfg.r);
  const EmFit f = fit(sigma, em);

  write_matrix_csv(dir / "S_hat.csv", f.S_hat.mat());
  write_matrix_csv(dir / "L_hat.csv",
                   f.L_hat.dim() ? f.L_hat.mat()
                                 : Eigen::MatrixXd::Zero(sigma.dim(), sigma.dim()));
  write_matrix_csv(dir / "K_hat.csv", f.partition.K().mat());

  json report = fit_summary(f, cfg.zero_tol);
  report["objective_trace"] = f.observed_objective_trace;
  write_json(dir / "fit_report.json", report);
  write_json(dir / "metadata.json", config_json(cfg, "fit"));

  std::cout << "fit r=" << cfg.r << " lambda=" << cfg.lambda
            << " iterations=" << f.iterations << " converged=" << f.converged
            << " rank(L_hat)=" << numerical_rank(f.L_hat) << "\n";
  return f.converged ? kExitOk : kExitNumerical;
}

int cmd_path(const RunConfig& cfg) {
  if (cfg.in.empty()) throw std::invalid_argument("path: --in <sigma_o_n.csv> is required");
  const fs::path dir = ensure_out_dir(cfg);
  const SymMatrix sigma = load_covariance(cfg.in);
  const std::vector<double> lambdas = parse_lambda_grid(cfg.lambda_grid, sigma);

  EmConfig em = em_config_of(cfg, cfg.r);
  const std::vector<EmFit> path = lambda_path(sigma, lambdas, em);

  json summary = json::array();
  bool all_ok = true;
  for (const EmFit& f : path) {
    summary.push_back(fit_summary(f, cfg.zero_tol));
    all_ok = all_ok && f.converged;
  }
  write_json(dir / "path_summary.json", summary);

  std::ofstream supports(dir / "supports.csv");
  if (!supports) throw IoError("cannot open for writing: " + (dir / "supports.csv").string());
  supports << "lambda,i,j\n";
  for (const EmFit& f : path) {
    if (f.S_hat.dim() == 0) continue;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", f.lambda);
    for (const auto& [i, j] : support(f.S_hat, cfg.zero_tol).pairs())
      supports << buf << ',' << i << ',' << j << '\n';
  }
  supports.flush();
  if (!supports) throw IoError("write failed: " + (dir / "supports.csv").string());

  write_json(dir / "metadata.json", config_json(cfg, "path"));
  std::cout << "path fitted " << path.size() << " lambdas, all converged=" << all_ok
            << "\n";
  return all_ok ? kExitOk : kExitNumerical;
}

int cmd_roc(const RunConfig& cfg) {
  if (cfg.in.empty())
    throw std::invalid_argument("roc: --in <simulate output dir> is required");
  const fs::path dir = ensure_out_dir(cfg);
  const fs::path in_dir(cfg.in);

  const json meta_in = read_json(in_dir / "metadata.json");
  const int p = meta_in.at("p").get<int>();
  const SymMatrix sigma = load_covariance(in_dir / "sigma_o_n.csv");
  if (sigma.dim() != p)
    throw std::invalid_argument("roc: sigma_o_n.csv does not match metadata p");
  const EdgeSet truth = read_edges_csv(in_dir / "edges.csv", p);
  const std::vector<double> lambdas = parse_lambda_grid(cfg.lambda_grid, sigma);

  struct Curve {
    std::string label;
    int r = 0;
    RocSeries series;
    std::size_t closest = 0;
    std::vector<EmFit> path;
  };
  std::vector<Curve> curves;
  curves.push_back({"lvglasso (r=" + std::to_string(cfg.r) + ")", cfg.r, {}, 0, {}});
  if (cfg.r > 0) curves.push_back({"glasso", 0, {}, 0, {}});
  if (cfg.r == 0) curves.front().label = "glasso";

  bool all_ok = true;
  for (Curve& c : curves) {
    const EmConfig em = em_config_of(cfg, c.r);
    c.path = lambda_path(sigma, lambdas, em);
    for (const EmFit& f : c.path) all_ok = all_ok && f.converged;
    c.series = roc(c.path, truth, cfg.zero_tol);
    c.closest = closest_to_truth(c.path, truth, cfg.zero_tol);
  }

  json meta = config_json(cfg, "roc");
  for (Curve& c : curves) {
    const std::string stem = c.r > 0 ? "roc_lvglasso" : "roc_glasso";
    write_roc_csv(dir / (stem + ".csv"), c.series);
    write_edges_csv(dir / ("closest_edges_" + (c.r > 0 ? std::string("lvglasso") : std::string("glasso")) + ".csv"),
                    support(c.path[c.closest].S_hat, cfg.zero_tol));
    meta[(c.r > 0 ? "auc_lvglasso" : "auc_glasso")] = c.series.auc;
    meta[(c.r > 0 ? "closest_lambda_lvglasso" : "closest_lambda_glasso")] =
        c.path[c.closest].lambda;
    std::cout << "AUC " << c.label << ": " << c.series.auc << "\n";
  }
  if (cfg.svg) {
    std::vector<std::pair<std::string, const RocSeries*>> svg_curves;
    for (const Curve& c : curves) svg_curves.emplace_back(c.label, &c.series);
    write_roc_svg(dir / "roc.svg", svg_curves);
  }
  write_json(dir / "metadata.json", meta);
  return all_ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"rank-constrained latent variable graphical lasso"};
  app.require_subcommand(1);

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic model and dataset");
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the estimator at one lambda");
  CLI::App* path_cmd = app.add_subcommand("path", "fit a descending lambda path");
  CLI::App* roc_cmd = app.add_subcommand("roc", "score support recovery against a simulated truth");

  for (CLI::App* sub : {sim, fit_cmd, path_cmd, roc_cmd}) {
    sub->add_option("--seed", cfg.seed, "base seed; all randomness derives from it");
    sub->add_option("--out-dir", cfg.out_dir, "output directory")->required();
  }
  sim->add_option("--p", cfg.p, "observed variables");
  sim->add_option("--h", cfg.h, "latent variables in the true model");
  sim->add_option("--n", cfg.n, "sample count");

  for (CLI::App* sub : {fit_cmd, path_cmd, roc_cmd}) {
    sub->add_option("--in", cfg.in)->required();
    sub->add_option("--r", cfg.r, "latent rank bound of the estimator");
    sub->add_option("--em-tol", cfg.em_tol);
    sub->add_option("--em-max-iter", cfg.em_max_iter);
    sub->add_option("--zero-tol", cfg.zero_tol);
    sub->add_option("--ridge", cfg.ridge, "diagonal ridge for the EM initializer");
  }
  fit_cmd->add_option("--lambda", cfg.lambda)->required();
  for (CLI::App* sub : {path_cmd, roc_cmd})
    sub->add_option("--lambda-grid", cfg.lambda_grid, "min,max,count[,log]; default 40 log-spaced");
  roc_cmd->add_flag("--svg", cfg.svg, "also write roc.svg");

  fit_cmd->description("fit: --in is the sigma_o_n CSV");
  roc_cmd->description("roc: --in is a simulate output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (sim->parsed()) return cmd_simulate(cfg);
    if (fit_cmd->parsed()) return cmd_fit(cfg);
    if (path_cmd->parsed()) return cmd_path(cfg);
    if (roc_cmd->parsed()) return cmd_roc(cfg);
    std::cerr << "no subcommand given\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
