// rmslca: fit, test, influence, constants and simulate from the command line.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rmslca/influence.hpp"
#include "rmslca/io.hpp"
#include "rmslca/noncorr.hpp"
#include "rmslca/sim.hpp"

using namespace rmslca;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string input;
  std::string blocks;
  double gamma = 0.75;
  std::string estimator = "mcd";
  int restarts = 500;
  std::uint64_t seed = 0;
  std::string family = "gaussian";
  double df = 5.0;
  bool whiten = false;
  std::string output;
  std::string format = "json";
  std::optional<double> level;
  int threads = 1;
};

// Simulation-only settings.
struct SimConfig {
  std::string experiment = "size_power";
  int n = 500;
  int replicates = 200;
  double eps = 0.0;
  std::string config;
  int z_draws = 200000;
};

Estimator parse_estimator(const std::string& s) { return s == "classical" ? Estimator::classical : Estimator::mcd; }

McdOptions mcd_options(const RunConfig& rc) {
  McdOptions o;
  o.restarts = rc.restarts;
  o.seed = rc.seed;
  return o;
}

EllipticalModel make_model(const RunConfig& rc, const Matrix& v) {
  return rc.family == "t" ? EllipticalModel::student_t(v, rc.df) : EllipticalModel::gaussian(v);
}

void emit(const RunConfig& rc, const std::string& text) {
  if (rc.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(rc.output);
  if (!out) throw InvalidArgument("cannot write '" + rc.output + "'");
  out << text;
}

void emit(const RunConfig& rc, const json& j) { emit(rc, j.dump(2) + "\n"); }

Dataset load(const RunConfig& rc) { return load_csv(rc.input, parse_block_spec(rc.blocks)); }

// Returns whitened data when requested; `transform` receives the back-mapping.
Dataset maybe_whiten(const RunConfig& rc, const Dataset& ds, std::optional<WhitenTransform>& transform) {
  if (!rc.whiten) return ds;
  auto w = whiten(ds, parse_estimator(rc.estimator), rc.gamma, mcd_options(rc));
  transform = std::move(w.transform);
  return std::move(w.data);
}

int cmd_fit(const RunConfig& rc) {
  std::optional<WhitenTransform> tr;
  const Dataset ds = maybe_whiten(rc, load(rc), tr);
  MslcaFit fit;
  if (parse_estimator(rc.estimator) == Estimator::classical) {
    fit = classical_fit(ds.rows, ds.structure);
  } else {
    RobustOptions ro;
    ro.gamma = rc.gamma;
    ro.mcd = mcd_options(rc);
    fit = robust_fit(ds.rows, ds.structure, ro);
  }
  json j = to_json(fit);
  j["n"] = ds.rows.rows();
  j["columns"] = ds.column_names;
  j["whitened"] = tr.has_value();
  if (tr) {
    Matrix back(fit.alpha.rows(), fit.alpha.cols());
    for (Eigen::Index c = 0; c < fit.alpha.cols(); ++c) back.col(c) = tr->map_direction(fit.alpha.col(c));
    j["alpha_original_scale"] = matrix_to_json(back.transpose());
  }
  if (fit.mcd) {
    j["mcd"] = {{"h", fit.mcd->h}, {"restarts", rc.restarts}, {"seed", rc.seed}, {"log_det", fit.mcd->objective}};
  }
  emit(rc, j);
  return 0;
}

int cmd_test(const RunConfig& rc) {
  std::optional<WhitenTransform> tr;
  const Dataset ds = maybe_whiten(rc, load(rc), tr);
  TestResult res;
  if (parse_estimator(rc.estimator) == Estimator::classical) {
    res = run_classical_test(ds.rows, ds.structure);
  } else {
    TestOptions opt;
    opt.gamma = rc.gamma;
    opt.mcd = mcd_options(rc);
    res = run_test(ds.rows, ds.structure, opt);
  }
  json j = to_json(res);
  j["estimator"] = rc.estimator;
  if (rc.level) {
    j["level"] = *rc.level;
    j["reject"] = res.p_value < *rc.level;
  }
  emit(rc, j);
  return 0;
}

int cmd_influence(const RunConfig& rc, int component) {
  const Dataset raw = load(rc);
  std::cerr << "notice: influence functions need whitened blocks; whitening with the " << rc.estimator
            << " estimator\n";
  const auto w = whiten(raw, parse_estimator(rc.estimator), rc.gamma, mcd_options(rc));
  const auto& bs = raw.structure;
  const ScatterMatrix v(w.transform.whitened_scatter(bs), bs);
  const IfContext ctx(v, compute_constants(rc.gamma, make_model(rc, Matrix::Identity(bs.q(), bs.q()))));
  if (component < 1 || component > bs.q()) throw InvalidArgument("--component must lie in 1.." + std::to_string(bs.q()));
  const int j = component - 1;
  const auto diag = if_diagnostics(w.data.rows, ctx, j);

  if (rc.format == "csv") {
    std::ostringstream out;
    out << "row,inside,if_T_norm,if_T_robust_norm,if_rho,if_rho_robust\n";
    for (std::size_t i = 0; i < diag.size(); ++i) {
      const auto& d = diag[i];
      out << i + 1 << ',' << (d.inside ? 1 : 0) << ',' << format_double(d.if_T_norm) << ','
          << format_double(d.if_T_robust_norm) << ',' << format_double(d.if_rho) << ','
          << format_double(d.if_rho_robust) << '\n';
    }
    emit(rc, out.str());
    return 0;
  }
  json rows = json::array();
  double max_cl = 0.0, max_rb = 0.0;
  int inside = 0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const auto& d = diag[i];
    rows.push_back({{"row", i + 1},
                    {"inside", d.inside},
                    {"if_T_norm", d.if_T_norm},
                    {"if_T_robust_norm", d.if_T_robust_norm},
                    {"if_rho", d.if_rho},
                    {"if_rho_robust", d.if_rho_robust}});
    max_cl = std::max(max_cl, d.if_T_norm);
    max_rb = std::max(max_rb, d.if_T_robust_norm);
    inside += d.inside;
  }
  json out{{"n", raw.rows.rows()},
           {"gamma", rc.gamma},
           {"estimator", rc.estimator},
           {"family", rc.family},
           {"component", component},
           {"rho", vector_to_json(ctx.fit().rho)},
           {"summary",
            {{"max_if_T_norm", max_cl},
             {"max_if_T_robust_norm", max_rb},
             {"bound_if_T_robust", bound_if_T_robust(ctx)},
             {"fraction_inside", static_cast<double>(inside) / static_cast<double>(diag.size())}}},
           {"rows", rows}};
  emit(rc, out);
  return 0;
}

int cmd_constants(const RunConfig& rc, int q) {
  if (q < 1) throw InvalidArgument("--q must be at least 1");
  const auto c = compute_constants(rc.gamma, make_model(rc, Matrix::Identity(q, q)));
  json j = to_json(c);
  j["family"] = rc.family;
  if (rc.family == "t") j["df"] = rc.df;
  emit(rc, j);
  return 0;
}

Vector json_vector(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string("config: ") + what + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Matrix json_matrix(const json& j, int q) {
  if (!j.is_array() || static_cast<int>(j.size()) != q) throw InvalidArgument("config: scatter must be q x q");
  Matrix m(q, q);
  for (int i = 0; i < q; ++i) {
    const Vector row = json_vector(j[static_cast<std::size_t>(i)], "scatter row");
    if (row.size() != q) throw InvalidArgument("config: scatter must be q x q");
    m.row(i) = row.transpose();
  }
  return m;
}

int cmd_simulate(const RunConfig& rc, const SimConfig& sc) {
  const auto labels = parse_block_spec(rc.blocks);
  const Dataset layout = make_dataset(Matrix::Zero(2, static_cast<Eigen::Index>(labels.size())), {}, labels);
  const BlockStructure& bs = layout.structure;
  const int q = bs.q();

  json cfg = json::object();
  if (!sc.config.empty()) {
    std::ifstream in(sc.config);
    if (!in) throw InvalidArgument("cannot read config '" + sc.config + "'");
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("config: ") + e.what());
    }
  }
  Matrix v = cfg.contains("scatter") ? json_matrix(cfg["scatter"], q) : Matrix::Identity(q, q);
  const Matrix standardized = standardize_blocks(ScatterMatrix(symmetrize(v), bs)).entries();
  if ((standardized - v).norm() > 1e-12) {
    std::cerr << "notice: scatter rescaled to identity diagonal blocks (T is unchanged)\n";
  }
  v = standardized;
  const auto model = make_model(rc, v);

  json report;
  std::ostringstream csv;
  double runtime = 0.0;
  if (sc.experiment == "size_power") {
    ContaminationSpec spec;
    spec.eps = sc.eps;
    spec.seed = rc.seed;
    if (sc.eps > 0.0) {
      const json c = cfg.value("contamination", json::object());
      const std::string mode = c.value("mode", "cluster");
      if (mode != "cluster" && mode != "point_mass") throw InvalidArgument("config: unknown contamination mode");
      spec.mode = mode == "cluster" ? ContaminationMode::cluster : ContaminationMode::point_mass;
      spec.x0 = c.contains("x0") ? json_vector(c["x0"], "x0") : Vector::Constant(q, 6.0);
      spec.cov_scale = c.value("cov_scale", 0.3);
    }
    SizePowerOptions opt;
    opt.mcd = mcd_options(rc);
    opt.threads = rc.threads;
    if (rc.level && std::find(opt.levels.begin(), opt.levels.end(), *rc.level) == opt.levels.end()) {
      opt.levels.push_back(*rc.level);
    }
    const auto rep = size_power(model, bs, rc.gamma, sc.n, sc.replicates, spec, rc.seed, opt);
    runtime = rep.runtime_seconds;
    report = to_json(rep);
    csv << "level,robust,classical,robust_qq1\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
      csv << format_double(rep.levels[i]) << ',' << format_double(rep.robust_rates[i]) << ','
          << format_double(rep.classical_rates[i]) << ',' << format_double(rep.robust_qq1_rates[i]) << '\n';
    }
  } else {
    CovarianceOptions opt;
    opt.estimator = parse_estimator(rc.estimator);
    opt.mcd = mcd_options(rc);
    opt.z_draws = sc.z_draws;
    opt.threads = rc.threads;
    const auto rep = mc_estimator_covariance(model, bs, rc.gamma, sc.n, sc.replicates, rc.seed, opt);
    runtime = rep.runtime_seconds;
    report = to_json(rep);
    csv << "row,col,empirical,theory\n";
    for (Eigen::Index c = 0; c < rep.theory.cols(); ++c) {
      for (Eigen::Index r = 0; r < rep.theory.rows(); ++r) {
        csv << r + 1 << ',' << c + 1 << ',' << format_double(rep.empirical(r, c)) << ','
            << format_double(rep.theory(r, c)) << '\n';
      }
    }
  }
  std::cerr << "runtime: " << runtime << " s\n";
  if (rc.format == "csv") {
    emit(rc, csv.str());
    return 0;
  }
  report.erase("runtime_seconds");
  report["dims"] = bs.dims();
  report["gamma"] = rc.gamma;
  report["seed"] = rc.seed;
  report["family"] = rc.family;
  report["eps"] = sc.eps;
  emit(rc, report);
  return 0;
}

CLI::Validator open_unit() {
  return CLI::Validator(
      [](std::string& s) {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v)) return std::string("not a number: ") + s;
        return v > 0.0 && v < 1.0 ? std::string() : "must lie strictly between 0 and 1";
      },
      "in (0,1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical and robust multiple-set linear canonical analysis"};
  app.require_subcommand(1);
  RunConfig rc;
  SimConfig sc;
  int q = 0;
  int component = 1;

  auto common = [&](CLI::App* s) {
    s->add_option("--gamma", rc.gamma, "MCD coverage")->check(open_unit())->capture_default_str();
    s->add_option("--restarts", rc.restarts, "FAST-MCD random starts")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--seed", rc.seed, "random seed")->capture_default_str();
    s->add_option("--output", rc.output, "write to this file instead of stdout");
  };
  auto data_opts = [&](CLI::App* s) {
    s->add_option("--input", rc.input, "CSV file with a header row")->required();
    s->add_option("--blocks", rc.blocks, "block label per column, e.g. 1,1,2,2")->required();
    s->add_option("--estimator", rc.estimator, "scatter estimator")
        ->check(CLI::IsMember({"classical", "mcd"}))
        ->capture_default_str();
  };
  auto family_opts = [&](CLI::App* s) {
    s->add_option("--family", rc.family, "generator family")->check(CLI::IsMember({"gaussian", "t"}))->capture_default_str();
    s->add_option("--df", rc.df, "degrees of freedom for --family t")->check(CLI::PositiveNumber)->capture_default_str();
  };

  auto* fit = app.add_subcommand("fit", "canonical coefficients and directions");
  data_opts(fit);
  common(fit);
  fit->add_flag("--whiten", rc.whiten, "whiten each block before fitting");

  auto* test = app.add_subcommand("test", "test of mutual non-correlation between blocks");
  data_opts(test);
  common(test);
  test->add_flag("--whiten", rc.whiten, "whiten each block before testing");
  test->add_option("--level", rc.level, "report the decision at this level")->check(open_unit());

  auto* infl = app.add_subcommand("influence", "per-row influence diagnostics (data are whitened first)");
  data_opts(infl);
  common(infl);
  family_opts(infl);
  infl->add_option("--component", component, "canonical coefficient index, 1-based")->capture_default_str();
  infl->add_option("--format", rc.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* cons = app.add_subcommand("constants", "robust constants for a generator family");
  cons->add_option("--q", q, "total dimension")->required()->check(CLI::PositiveNumber);
  cons->add_option("--gamma", rc.gamma, "MCD coverage")->check(open_unit())->capture_default_str();
  cons->add_option("--output", rc.output, "write to this file instead of stdout");
  family_opts(cons);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiments");
  sim->add_option("--experiment", sc.experiment, "experiment")
      ->check(CLI::IsMember({"size_power", "covariance"}))
      ->capture_default_str();
  sim->add_option("--blocks", rc.blocks, "block label per coordinate, e.g. 1,1,2,2,3,3")->required();
  common(sim);
  family_opts(sim);
  sim->add_option("--estimator", rc.estimator, "estimator for --experiment covariance")
      ->check(CLI::IsMember({"classical", "mcd"}))
      ->capture_default_str();
  sim->add_option("--n", sc.n, "sample size")->check(CLI::Range(2, 100000000))->capture_default_str();
  sim->add_option("--replicates", sc.replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--eps", sc.eps, "contamination fraction")->check(CLI::Range(0.0, 0.4999))->capture_default_str();
  sim->add_option("--config", sc.config, "JSON with optional scatter and contamination settings");
  sim->add_option("--level", rc.level, "extra test level")->check(open_unit());
  sim->add_option("--z-draws", sc.z_draws, "draws for the limit covariance")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--threads", rc.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--format", rc.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (*fit) return cmd_fit(rc);
    if (*test) return cmd_test(rc);
    if (*infl) return cmd_influence(rc, component);
    if (*cons) return cmd_constants(rc, q);
    return cmd_simulate(rc, sc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
