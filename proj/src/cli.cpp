#include "phhinf/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "phhinf/kyp.hpp"
#include "phhinf/models.hpp"
#include "phhinf/reduce.hpp"

namespace phhinf::cli {

namespace fs = std::filesystem;

sys::PHSystem load_model(const ModelSpec& ms) {
  if (ms.model == "dc") return models::dc_motor();
  if (ms.model == "msd")
    return models::msd_chain({ms.n_masses, ms.mass, ms.stiffness, ms.damping});
  if (fs::is_directory(ms.model)) return sys::load_ph_system(ms.model);
  throw Error(ErrorCode::kInvalidArgument, "unknown model '" + ms.model + "'");
}

Json model_json(const ModelSpec& ms) {
  Json j;
  j["model"] = ms.model;
  if (ms.model == "msd") {
    j["n_masses"] = ms.n_masses;
    j["mass"] = ms.mass;
    j["stiffness"] = ms.stiffness;
    j["damping"] = ms.damping;
  }
  return j;
}

namespace {

ModelSpec model_from_json(const Json& j) {
  ModelSpec s;
  s.model = j.value("model", "dc");
  s.n_masses = j.value("n_masses", 5);
  s.mass = j.value("mass", 4.0);
  s.stiffness = j.value("stiffness", 4.0);
  s.damping = j.value("damping", 1.0);
  return s;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "bad " + what + " '" + s + "'");
  }
}

std::string trim(std::string s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

}  // namespace

Matrix parse_P(const std::string& text, const sys::PHSystem& ph) {
  const int n = ph.n();
  std::string t = trim(text);
  if (t.empty() || t == "none" || t == "0") return Matrix::Zero(n, n);
  auto scaled = [&](const std::string& suffix) -> std::optional<double> {
    if (t.size() < suffix.size() || t.compare(t.size() - suffix.size(), suffix.size(), suffix) != 0)
      return std::nullopt;
    std::string a = t.substr(0, t.size() - suffix.size());
    if (!a.empty() && a.back() == '*') a.pop_back();
    return a.empty() ? 1.0 : parse_double(a, "P scale");
  };
  if (auto a = scaled("Xmax")) {
    kyp::Extremal e = kyp::extremal_kyp(sys::ph_to_ss(ph));
    return *a * e.X_max;
  }
  if (auto a = scaled("Q")) return *a * ph.Q();
  if (fs::exists(t)) return matkit::read_matrix_market(t);
  throw Error(ErrorCode::kInvalidArgument, "bad P value '" + text + "'");
}

std::vector<double> gamma_grid(double lo, double hi, int count) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "grid needs at least one point");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return g;
}

int resolve_jobs(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("PHHINF_JOBS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

std::vector<SweepRow> run_sweep(const sys::PHSystem& ph, const SweepConfig& cfg) {
  for (size_t i = 0; i < cfg.gammas.size(); ++i) {
    if (!(cfg.gammas[i] > 1.0))
      throw Error(ErrorCode::kInvalidArgument, "gamma grid must lie above 1");
    if (i > 0 && !(cfg.gammas[i] > cfg.gammas[i - 1]))
      throw Error(ErrorCode::kInvalidArgument, "gamma grid must be strictly increasing");
  }
  const sys::StateSpace plant = sys::ph_to_ss(ph);
  const size_t nv = cfg.variants.size();
  const size_t total = cfg.gammas.size() * nv;
  std::vector<SweepRow> rows(total);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t k = next++; k < total; k = next++) {
      SweepRow& row = rows[k];
      row.gamma = cfg.gammas[k / nv];
      row.variant = cfg.variants[k % nv];
      try {
        synth::Controller c = synth::synthesize(ph, row.variant, row.gamma, cfg.P);
        row.norm = synth::closed_loop_norm(plant, c);
        row.bound_satisfied = row.norm < row.gamma;
      } catch (const Error& e) {
        row.norm = std::nan("");
        row.bound_satisfied = false;
        row.reason = std::string(to_string(e.code()));
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "gamma,variant,closed_loop_norm,bound_satisfied,reason\n";
  for (const SweepRow& r : rows) {
    out += fmt(r.gamma) + "," + synth::to_string(r.variant) + "," +
           (std::isnan(r.norm) ? std::string("nan") : fmt(r.norm)) + "," +
           (r.bound_satisfied ? "true" : "false") + "," + r.reason + "\n";
  }
  return out;
}

Json certificate_json(const synth::Controller& c, const sys::StateSpace& plant) {
  const synth::Certificate& cert = c.certificate;
  Json j;
  j["gamma"] = c.gamma;
  j["variant"] = synth::to_string(c.variant);
  j["plant_order"] = plant.n();
  j["controller_order"] = c.realization.n();
  j["filter_residual"] = cert.filter_residual;
  j["filter_mode"] = riccati::to_string(cert.filter_mode);
  j["control_residual"] = cert.control_residual;
  j["control_mode"] = riccati::to_string(cert.control_mode);
  if (cert.spectral_radius) j["spectral_radius_XY"] = *cert.spectral_radius;
  if (c.ph) {
    const Matrix& R = c.ph->R();
    double lmin = matkit::lambda_min(R);
    j["ph_check"] = {{"passed", lmin >= -1e-8 * std::max(matkit::norm2(R), 1e-300)},
                     {"lambda_min_R", lmin},
                     {"lambda_min_Q", matkit::lambda_min(c.ph->Q())}};
  } else {
    j["ph_check"] = {{"passed", false}, {"reason", "classical controller has no pH form"}};
  }
  if (cert.lure) {
    j["lure"] = {{"strong", cert.lure->strong()},
                 {"gram_residual", cert.lure->gram_residual},
                 {"dissipation_residual", cert.lure->dissipation_residual},
                 {"rank_L", cert.lure->L.cols()}};
  }
  j["bound_certified"] = cert.bound_certified;
  double norm = synth::closed_loop_norm(plant, c);
  j["closed_loop_norm"] = norm;
  j["bound_satisfied"] = norm < c.gamma;
  return j;
}

void save_controller(const std::string& dir, const synth::Controller& c, const Json& meta) {
  std::map<std::string, Matrix> blocks{
      {"A", c.realization.A()}, {"B", c.realization.B()}, {"C", c.realization.C()},
      {"D", c.realization.D()}, {"X", c.X},  {"Y", c.Y},
      {"P", c.P},   {"D1", c.weights.D1}, {"D2", c.weights.D2},
      {"E1", c.weights.E1}, {"E2", c.weights.E2}};
  if (c.ph) {
    blocks["ph_J"] = c.ph->J();
    blocks["ph_R"] = c.ph->R();
    blocks["ph_Q"] = c.ph->Q();
    blocks["ph_B"] = c.ph->B();
  }
  if (c.certificate.lure) blocks["lure_L"] = c.certificate.lure->L;
  sys::save_blocks(dir, "hinf_controller", blocks, meta);
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kIndefiniteV1:
    case ErrorCode::kInadmissibleP:
    case ErrorCode::kInvalidArgument:
      return 2;
    default:
      return 1;
  }
}

namespace {

// key = value lines; '#' starts a comment. Applied only to options the
// command line left unset.
void apply_config(CLI::App* app, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot read config " + path);
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "bad config line: " + line);
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    for (char& ch : key)
      if (ch == '_') ch = '-';
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
    }
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

void add_model_options(CLI::App* app, ModelSpec& m) {
  app->add_option("--model", m.model, "msd, dc, or a saved pH system directory");
  app->add_option("--n", m.n_masses, "number of masses for msd (state dimension 2n)");
  app->add_option("--mass", m.mass);
  app->add_option("--stiffness", m.stiffness);
  app->add_option("--damping", m.damping);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
  f << text;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw Error(ErrorCode::kInvalidArgument, "grid is lo:hi:count");
    return gamma_grid(parse_double(parts[0], "grid"), parse_double(parts[1], "grid"),
                      static_cast<int>(parse_double(parts[2], "grid")));
  }
  std::vector<double> g;
  for (const auto& s : split(text, ',')) g.push_back(parse_double(s, "gamma"));
  return g;
}

std::vector<int> parse_orders(const std::string& text, int n, int m) {
  std::vector<int> out;
  if (text.empty()) {
    for (int r = std::max(2, m); r < n; r += 2) out.push_back(r);
    return out;
  }
  for (const auto& s : split(text, ',')) out.push_back(static_cast<int>(parse_double(s, "order")));
  return out;
}

struct Common {
  ModelSpec model;
  std::string config;
};

int cmd_synthesize(const Common& c, double gamma, const std::string& variant,
                   const std::string& p_spec, const std::string& out) {
  if (!(gamma > 1.0)) {
    std::cerr << "gamma must be > 1\n";
    return 2;
  }
  sys::PHSystem ph = load_model(c.model);
  sys::StateSpace plant = sys::ph_to_ss(ph);
  synth::Variant v = synth::parse_variant(variant);
  Matrix P = parse_P(p_spec, ph);
  if (v != synth::Variant::kModifiedWithP && !P.isZero(0.0))
    throw Error(ErrorCode::kInvalidArgument, "--P only applies to modified-with-P");
  synth::Controller ctrl = synth::synthesize(ph, v, gamma, P);
  Json cert = certificate_json(ctrl, plant);
  Json meta;
  meta["plant"] = model_json(c.model);
  meta["certificate"] = cert;
  if (!out.empty()) save_controller(out, ctrl, meta);
  std::cout << cert.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const Common& c, const std::string& grid, const std::string& variants,
              const std::string& p_spec, const std::string& out, int jobs) {
  sys::PHSystem ph = load_model(c.model);
  SweepConfig cfg;
  if (!grid.empty()) cfg.gammas = parse_grid(grid);
  cfg.P = parse_P(p_spec, ph);
  if (!variants.empty()) {
    cfg.variants.clear();
    for (const auto& s : split(variants, ',')) cfg.variants.push_back(synth::parse_variant(s));
  } else if (!cfg.P.isZero(0.0)) {
    cfg.variants.push_back(synth::Variant::kModifiedWithP);
  }
  cfg.jobs = resolve_jobs(jobs);
  write_text(out, sweep_csv(run_sweep(ph, cfg)));
  return 0;
}

int cmd_reduce(const Common& c, double gamma, const std::string& p_spec,
               const std::string& reps, const std::string& orders_text, double eps,
               bool classical, const std::string& out) {
  if (!(gamma > 1.0)) {
    std::cerr << "gamma must be > 1\n";
    return 2;
  }
  sys::PHSystem ph = load_model(c.model);
  sys::StateSpace ss = sys::ph_to_ss(ph);
  Matrix P = parse_P(p_spec, ph);
  std::vector<int> orders = parse_orders(orders_text, ph.n(), ph.m());
  std::vector<kyp::Representation> rs;
  for (const auto& s : split(reps, ',')) rs.push_back(kyp::parse_representation(s));

  Json report;
  report["model"] = model_json(c.model);
  report["gamma"] = gamma;
  report["P"] = p_spec.empty() ? "none" : p_spec;
  report["orders"] = orders;
  std::optional<kyp::Extremal> ext;
  std::string ext_error;
  for (auto r : rs) {
    if (r != kyp::Representation::kCanonical && !ext && ext_error.empty()) {
      try {
        ext = kyp::extremal_kyp(ss, eps);
        report["extremal"] = {{"eps", ext->eps},
                              {"residual_min", ext->residual_min},
                              {"residual_max", ext->residual_max}};
      } catch (const Error& e) {
        ext_error = e.what();
      }
    }
  }
  Json curves = Json::object();
  auto emit = [&](const std::string& name, const std::vector<reduce::CurvePoint>& curve) {
    write_text((fs::path(out) / (name + ".csv")).string(), reduce::curve_csv(curve));
    Json pts = Json::array();
    for (const auto& p : curve) {
      Json e = {{"r", p.r}};
      if (p.error) e["error"] = *p.error;
      else e["failure"] = p.reason;
      pts.push_back(e);
    }
    curves[name] = {{"points", pts}};
  };
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  fs::create_directories(out);
  for (auto r : rs) {
    std::string name = std::string("mhinf_") + kyp::to_string(r);
    try {
      if (r != kyp::Representation::kCanonical && !ext) throw Error(ErrorCode::kNonConvergence, ext_error);
      emit(name, reduce::error_curve(ph, gamma, P, r, orders, ext ? &*ext : nullptr));
    } catch (const Error& e) {
      curves[name] = {{"failure", e.what()}};
    }
  }
  if (classical) {
    try {
      emit("classical", reduce::classical_error_curve(ss, gamma, orders));
    } catch (const Error& e) {
      curves["classical"] = {{"failure", e.what()}};
    }
  }
  report["curves"] = curves;
  write_text((fs::path(out) / "report.json").string(), report.dump(2) + "\n");
  return 0;
}

int cmd_norm(const Common& c, const std::string& system_dir) {
  sys::StateSpace ss = system_dir.empty() ? sys::ph_to_ss(load_model(c.model))
                                          : sys::load_state_space(system_dir);
  std::cout << fmt(synth::hinf_norm(ss)) << "\n";
  return 0;
}

int cmd_export(const Common& c, const std::string& out) {
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  sys::save(out, load_model(c.model), model_json(c.model));
  return 0;
}

int cmd_verify(Common c, bool model_given, const std::string& dir) {
  if (dir.empty()) throw Error(ErrorCode::kInvalidArgument, "--controller is required");
  Json manifest = sys::load_manifest(dir);
  const Json meta = manifest.value("meta", Json::object());
  if (!model_given && meta.contains("plant")) c.model = model_from_json(meta["plant"]);
  sys::PHSystem ph = load_model(c.model);
  sys::StateSpace plant = sys::ph_to_ss(ph);
  const Json cert = meta.value("certificate", Json::object());
  const double gamma = cert.value("gamma", 0.0);
  const std::string variant = cert.value("variant", "classical");

  sys::StateSpace ctrl = sys::load_state_space(dir);
  Matrix X = sys::load_block(dir, manifest, "X");
  Matrix P = sys::load_block(dir, manifest, "P");
  synth::Weights w{sys::load_block(dir, manifest, "D1"), sys::load_block(dir, manifest, "D2"),
                   sys::load_block(dir, manifest, "E1"), sys::load_block(dir, manifest, "E2")};
  Json checks;
  bool ok = true;
  auto record = [&](const std::string& name, bool pass, const std::string& detail) {
    checks[name] = {{"passed", pass}, {"detail", detail}};
    ok = ok && pass;
  };
  if (variant != "classical") {
    try {
      sys::PHSystem cph = synth::controller_to_ph(ctrl, X);
      double lmin = matkit::lambda_min(cph.R());
      record("ph_form", lmin >= -1e-8 * std::max(matkit::norm2(cph.R()), 1e-300),
             "lambda_min(R) = " + fmt(lmin));
    } catch (const Error& e) {
      record("ph_form", false, e.what());
    }
    try {
      kyp::LureCertificate lc;
      lc.P = X;
      lc.L = sys::load_block(dir, manifest, "lure_L");
      if (variant == "modified-with-P") lc.S = P;
      record("lure", kyp::verify(ctrl, lc), lc.S ? "strong, S = P" : "P = X");
    } catch (const Error& e) {
      record("lure", false, e.what());
    }
  }
  try {
    double norm =
        synth::hinf_norm(synth::interconnect(plant, ctrl, w).as_state_space());
    record("closed_loop_bound", norm < gamma, "norm " + fmt(norm) + " vs gamma " + fmt(gamma));
  } catch (const Error& e) {
    record("closed_loop_bound", false, e.what());
  }
  Json outj = {{"controller", dir}, {"passed", ok}, {"checks", checks}};
  std::cout << outj.dump(2) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Structure-preserving H-infinity synthesis and reduction for pH systems"};
  app.require_subcommand(1);

  Common common;
  double gamma = 2.0;
  std::string variant = "modified", p_spec, out, grid, variants, reps = "canonical,xmin,xmax";
  std::string orders, system_dir, controller_dir;
  double eps = 1e-12;
  int jobs = 0;
  bool no_classical = false;

  auto with_config = [&](CLI::App* sub) {
    add_model_options(sub, common.model);
    sub->add_option("--config", common.config, "key = value file; flags win");
  };

  auto* syn = app.add_subcommand("synthesize", "synthesize one controller");
  with_config(syn);
  syn->add_option("--gamma", gamma);
  syn->add_option("--variant", variant, "classical | modified | modified-with-P");
  syn->add_option("--P", p_spec, "none | <alpha>Q | <alpha>Xmax | file.mtx");
  syn->add_option("--out", out, "directory for the controller");

  auto* swp = app.add_subcommand("sweep", "closed-loop norms over a gamma grid");
  with_config(swp);
  swp->add_option("--gammas", grid, "lo:hi:count or comma list (default 1.05:3.95:30)");
  swp->add_option("--variants", variants, "comma list of variants");
  swp->add_option("--P", p_spec);
  swp->add_option("--out", out, "CSV path (default stdout)");
  swp->add_option("--jobs", jobs, "worker threads (PHHINF_JOBS fallback)");

  auto* red = app.add_subcommand("reduce", "error curves per Hamiltonian representation");
  with_config(red);
  red->add_option("--gamma", gamma);
  red->add_option("--P", p_spec);
  red->add_option("--representations", reps);
  red->add_option("--orders", orders, "comma list (default even orders below n)");
  red->add_option("--eps", eps, "KYP regularisation");
  red->add_flag("--no-classical", no_classical);
  red->add_option("--out", out, "output directory");

  auto* nrm = app.add_subcommand("norm", "H-infinity norm of a system");
  with_config(nrm);
  nrm->add_option("--system", system_dir, "saved system directory");

  auto* mdl = app.add_subcommand("model", "benchmark models");
  mdl->require_subcommand(1);
  auto* exp = mdl->add_subcommand("export", "write a benchmark model");
  with_config(exp);
  exp->add_option("--out", out, "output directory");

  auto* ver = app.add_subcommand("verify", "re-validate a saved controller");
  with_config(ver);
  ver->add_option("--controller", controller_dir, "saved controller directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (CLI::App* sub : {syn, swp, red, nrm, exp, ver})
      if (sub->parsed() && !common.config.empty()) apply_config(sub, common.config);
    if (syn->parsed()) return cmd_synthesize(common, gamma, variant, p_spec, out);
    if (swp->parsed()) return cmd_sweep(common, grid, variants, p_spec, out, jobs);
    if (red->parsed())
      return cmd_reduce(common, gamma, p_spec, reps, orders, eps, !no_classical, out);
    if (nrm->parsed()) return cmd_norm(common, system_dir);
    if (exp->parsed()) return cmd_export(common, out);
    if (ver->parsed()) return cmd_verify(common, ver->get_option("--model")->count() > 0, controller_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace phhinf::cli
