// Command-line front end: sweeps, reports, and plot-ready tables for the
// asymptotic analysis of rank-two irregular Higgs-bundle moduli.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hitchin/divisor.hpp"
#include "hitchin/fourdim.hpp"
#include "hitchin/gluing.hpp"
#include "hitchin/painleve.hpp"
#include "hitchin/spectral.hpp"
#include "json.hpp"
#include "sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hitchin;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RunConfig {
  std::string command;
  std::string case_name;
  std::string divisor_file;
  double t_start = 1e2;
  double t_stop = 1e5;
  int points = 7;
  std::string spacing = "geometric";
  MuMap mus;
  double kappa = 0.3;
  double quad_rel = 1e-5;
  double alpha1 = 0.25;
  double rho_min = kDefaultRhoMin;
  double rho_max = kDefaultRhoMax;
  int grid_points = kDefaultProfilePoints;
  std::string out_dir = "out";
  int threads = 1;

  void validate() const {
    if (points < 1) throw std::invalid_argument("config: points must be >= 1");
    if (points > 1 && !(t_start < t_stop))
      throw std::invalid_argument("config: t-start must be below t-stop");
    if (spacing != "geometric" && spacing != "linear")
      throw std::invalid_argument("config: spacing must be geometric or linear");
    if (!(kappa > 0.0)) throw std::invalid_argument("config: kappa must be positive");
    if (!(quad_rel > 0.0))
      throw std::invalid_argument("config: tolerances.quad_rel must be positive");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  }

  std::vector<double> sweep() const {
    std::vector<double> ts;
    if (points == 1) {
      ts.push_back(t_start);
      return ts;
    }
    for (int i = 0; i < points; ++i) {
      double f = static_cast<double>(i) / (points - 1);
      ts.push_back(spacing == "geometric" ? t_start * std::pow(t_stop / t_start, f)
                                          : t_start + (t_stop - t_start) * f);
    }
    return ts;
  }
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j = json::parse(in);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "command") cfg.command = it->get<std::string>();
    else if (k == "case") cfg.case_name = it->get<std::string>();
    else if (k == "divisor_file") cfg.divisor_file = it->get<std::string>();
    else if (k == "t") {
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        if (jt.key() == "start") cfg.t_start = jt->get<double>();
        else if (jt.key() == "stop") cfg.t_stop = jt->get<double>();
        else if (jt.key() == "points") cfg.points = jt->get<int>();
        else if (jt.key() == "spacing") cfg.spacing = jt->get<std::string>();
        else throw std::invalid_argument("config: unknown key t." + jt.key());
      }
    } else if (k == "mus") {
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        if (jt->is_array())
          cfg.mus[jt.key()] = cplx(jt->at(0).get<double>(), jt->at(1).get<double>());
        else cfg.mus[jt.key()] = cplx(jt->get<double>(), 0.0);
      }
    } else if (k == "kappa") cfg.kappa = it->get<double>();
    else if (k == "tolerances") {
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        if (jt.key() == "quad_rel") cfg.quad_rel = jt->get<double>();
        else throw std::invalid_argument("config: unknown key tolerances." + jt.key());
      }
    } else if (k == "alpha1") cfg.alpha1 = it->get<double>();
    else if (k == "rho_min") cfg.rho_min = it->get<double>();
    else if (k == "rho_max") cfg.rho_max = it->get<double>();
    else if (k == "grid_points") cfg.grid_points = it->get<int>();
    else if (k == "out_dir") cfg.out_dir = it->get<std::string>();
    else if (k == "threads") cfg.threads = it->get<int>();
    else throw std::invalid_argument("config: unknown key " + k);
  }
}

// Collects artifacts in memory, then writes them plus a manifest with
// content hashes; byte-identical across reruns of the same config.
class Emitter {
 public:
  explicit Emitter(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const std::string& content) {
    files_.emplace_back(name, content);
  }

  void flush() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::ios_base::failure("cannot create " + dir_.string());
    json manifest = json::array();
    std::sort(files_.begin(), files_.end());
    for (const auto& [name, content] : files_) {
      std::ofstream out(dir_ / name, std::ios::binary);
      if (!out) throw std::ios_base::failure("cannot write " + name);
      out << content;
      manifest.push_back({{"path", name},
                          {"bytes", content.size()},
                          {"sha256", sha256::hex_digest(content)}});
    }
    std::ofstream mf(dir_ / "manifest.json", std::ios::binary);
    if (!mf) throw std::ios_base::failure("cannot write manifest.json");
    mf << manifest.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

template <typename F>
void parallel_for(int n, int threads, F&& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < std::min(threads, n); ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

CaseId require_case(const RunConfig& cfg) {
  if (cfg.case_name.empty())
    throw std::invalid_argument("config: this command needs --case");
  auto id = case_by_name(cfg.case_name);
  if (!id) throw std::invalid_argument("config: unknown case " + cfg.case_name);
  return *id;
}

BasePoint base_point_at(const RunConfig& cfg, double t) {
  if (!cfg.divisor_file.empty()) {
    std::ifstream in(cfg.divisor_file);
    if (!in) throw std::invalid_argument("config: cannot open " + cfg.divisor_file);
    std::stringstream ss;
    ss << in.rdbuf();
    BasePoint b = [&] {
      try {
        return base_point_from_json(ss.str());
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: " + cfg.divisor_file + ": " + e.what());
      }
    }();
    std::vector<double> sc(b.free_coeffs.size(), 1.0);
    sc.back() = t;
    return build_base_point(b.divisor, b.free_coeffs, sc);
  }
  return case_base_point(require_case(cfg), cfg.mus, t);
}

json case_to_json(const FourDimCase& c) {
  json mus = json::object();
  for (const auto& [k, v] : c.default_mu) mus[k] = json::array({v.real(), v.imag()});
  json model{{"family", c.model.alg_star ? "ALG*" : "ALG"},
             {"kodaira", c.model.kodaira},
             {"dynkin", c.model.dynkin}};
  if (c.model.alg_star) {
    model["istar_index"] = c.model.istar_index;
  } else {
    model["beta"] = c.model.beta;
    model["tau_model"] =
        json::array({c.model.tau_model.real(), c.model.tau_model.imag()});
    model["cone_angle"] = c.sk_form.cone_angle();
  }
  json sk = c.sk_form.conic
                ? json{{"form", "conic"}, {"exponent", c.sk_form.conic_exponent}}
                : json{{"form", "log"}, {"coefficient", c.sk_form.log_coefficient}};
  Sigma s = compute_sigma(case_divisor(c.id, {}));
  return json{{"name", c.name},       {"description", c.description},
              {"free_mu", c.free_mu}, {"default_mu", mus},
              {"sk_form", sk},        {"model", model},
              {"sigma", json{{"num", s.num}, {"den", s.den}}}};
}

void cmd_catalog(const RunConfig&, Emitter& em) {
  json arr = json::array();
  std::ostringstream csv;
  csv << "name,family,kodaira,dynkin,beta,cone_angle,log_coefficient,sigma\n";
  for (const auto& c : case_catalog()) {
    arr.push_back(case_to_json(c));
    Sigma s = compute_sigma(case_divisor(c.id, {}));
    csv << c.name << ',' << (c.model.alg_star ? "ALG*" : "ALG") << ','
        << c.model.kodaira << ',' << c.model.dynkin << ','
        << (c.model.alg_star ? "" : g17(c.model.beta)) << ','
        << (c.sk_form.conic ? g17(c.sk_form.cone_angle()) : "") << ','
        << (c.sk_form.conic ? "" : g17(c.sk_form.log_coefficient)) << ',' << s.num
        << '/' << s.den << '\n';
  }
  em.add("catalog.json", arr.dump(2) + "\n");
  em.add("catalog.csv", csv.str());
}

void cmd_roots(const RunConfig& cfg, Emitter& em) {
  std::ostringstream csv;
  csv << "t,index,root_re,root_im,pred_re,pred_im,prediction_error\n";
  for (double t : cfg.sweep()) {
    BasePoint b = base_point_at(cfg, t);
    auto roots = find_roots(tilde_nu(b));
    std::optional<std::vector<cplx>> preds;
    try {
      preds = root_asymptotics(b, t);
    } catch (const std::invalid_argument&) {
      if (!cfg.case_name.empty())
        preds = case_root_predictions(require_case(cfg), t, cfg.mus);
    }
    for (size_t i = 0; i < roots.size(); ++i) {
      csv << g17(t) << ',' << i << ',' << g17(roots[i].real()) << ','
          << g17(roots[i].imag()) << ',';
      if (preds) {
        double best = 1e300;
        cplx bp = 0.0;
        for (const auto& p : *preds)
          if (std::abs(p - roots[i]) < best) {
            best = std::abs(p - roots[i]);
            bp = p;
          }
        csv << g17(bp.real()) << ',' << g17(bp.imag()) << ',' << g17(best);
      } else {
        csv << ",,";
      }
      csv << '\n';
    }
  }
  em.add("roots.csv", csv.str());
}

void cmd_masses(const RunConfig& cfg, Emitter& em) {
  std::ostringstream csv;
  bool first = true;
  for (double t : cfg.sweep()) {
    BasePoint b = base_point_at(cfg, t);
    RamificationData ram = analyze_ramification(b, t);
    std::string rows = ram.to_csv(t);
    if (!first) rows = rows.substr(rows.find('\n') + 1);
    csv << rows;
    first = false;
  }
  em.add("masses.csv", csv.str());
}

void cmd_fiducial(const RunConfig& cfg, Emitter& em) {
  FiducialProfile p1 = solve_psi1(cfg.rho_min, cfg.rho_max, cfg.grid_points);
  em.add("psi1.csv", p1.to_csv());
  FiducialProfile p2 = solve_psi2(cfg.alpha1, cfg.rho_min, cfg.rho_max, cfg.grid_points);
  em.add("psi2.csv", p2.to_csv());
  json j{{"psi1",
          {{"certified_residual", p1.certified_residual},
           {"small_rho_constant", p1.small_rho_constant}}},
         {"psi2",
          {{"alpha1", cfg.alpha1},
           {"certified_residual", p2.certified_residual},
           {"small_rho_constant", p2.small_rho_constant}}}};
  em.add("fiducial.json", j.dump(2) + "\n");
}

void cmd_residual_decay(const RunConfig& cfg, Emitter& em) {
  std::vector<double> ts = cfg.sweep();
  BasePoint b0 = base_point_at(cfg, ts.front());
  ProfileSet profiles =
      make_profiles(b0.divisor, cfg.rho_min, cfg.rho_max, cfg.grid_points);
  std::vector<ResidualReport> reports(ts.size());
  std::vector<std::exception_ptr> errors(ts.size());
  parallel_for(static_cast<int>(ts.size()), cfg.threads, [&](int i) {
    try {
      reports[i] =
          residual_l2_norm(base_point_at(cfg, ts[i]), ts[i], profiles, cfg.kappa);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::pair<double, double>> samples;
  json per_t = json::array();
  for (size_t i = 0; i < ts.size(); ++i) {
    samples.push_back({ts[i], reports[i].log_total});
    per_t.push_back(json::parse(reports[i].to_json()));
  }
  em.add("decay.csv", decay_table_csv(samples));
  em.add("reports.json", per_t.dump(2) + "\n");

  Sigma sig = compute_sigma(b0.divisor);
  json fit_j{{"sigma_used", {{"num", sig.num}, {"den", sig.den}}}};
  if (samples.size() >= 4) {
    DecayFit fit = decay_fit(samples, sig.value());
    FreeDecayFit ff = decay_fit_free_sigma(samples);
    fit_j["fit"] = {{"c", fit.c}, {"cprime", fit.cprime}, {"r_squared", fit.r_squared}};
    fit_j["free_sigma_fit"] = {{"sigma", ff.sigma},
                               {"c", ff.fit.c},
                               {"cprime", ff.fit.cprime},
                               {"r_squared", ff.fit.r_squared}};
  }
  em.add("fit.json", fit_j.dump(2) + "\n");
}

void cmd_sk_sweep(const RunConfig& cfg, Emitter& em) {
  CaseId id = require_case(cfg);
  std::vector<double> ts = cfg.sweep();
  std::vector<SkValue> vals(ts.size());
  std::vector<std::exception_ptr> errors(ts.size());
  parallel_for(static_cast<int>(ts.size()), cfg.threads, [&](int i) {
    try {
      vals[i] = sk_metric_numeric(id, ts[i], cfg.mus, cfg.quad_rel);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ostringstream csv;
  csv << "t,g_sK,error_estimate\n";
  std::vector<std::pair<double, double>> samples;
  for (size_t i = 0; i < ts.size(); ++i) {
    csv << g17(ts[i]) << ',' << g17(vals[i].value) << ','
        << g17(vals[i].error_estimate) << '\n';
    samples.push_back({ts[i], vals[i].value});
  }
  em.add("sk_sweep.csv", csv.str());
  // plot-ready two-column data: conic cases (log t, log g), log cases (log t, g t)
  const auto& info = case_info(id);
  std::ostringstream plot;
  for (const auto& [t, g] : samples)
    plot << g17(std::log(t)) << ' ' << g17(info.sk_form.conic ? std::log(g) : g * t)
         << '\n';
  em.add("sk_plot.dat", plot.str());
  if (samples.size() >= 5 && samples.back().first / samples.front().first >= 99.0) {
    SkFitReport rep = sk_leading_fit(id, samples);
    json j{{"conic", rep.conic},
           {"slope", rep.slope},
           {"intercept", rep.intercept},
           {"r_squared", rep.r_squared},
           {"expected_slope", rep.expected_slope}};
    if (rep.conic) {
      j["fitted_cone_angle"] = rep.fitted_cone_angle;
      j["expected_cone_angle"] = info.sk_form.cone_angle();
    } else {
      // reported side by side; the normalization to the Gibbons-Hawking nu is
      // left open deliberately
      j["gibbons_hawking_nu_candidate"] = rep.slope / (4.0 * M_PI * M_PI);
    }
    em.add("sk_fit.json", j.dump(2) + "\n");
  }
}

void cmd_fiber_tau(const RunConfig& cfg, Emitter& em) {
  CaseId id = require_case(cfg);
  std::vector<double> ts = cfg.sweep();
  auto sweep = fiber_tau_sweep(id, ts, cfg.mus);
  std::ostringstream csv;
  csv << "t,tau_re,tau_im,ref_re,ref_im,abs_error\n";
  double max_dev = 0.0;
  std::vector<std::pair<double, double>> err_samples;
  for (const auto& pt : sweep) {
    double dev = std::abs(pt.tau - pt.tau_ref);
    max_dev = std::max(max_dev, dev);
    csv << g17(pt.t) << ',' << g17(pt.tau.real()) << ',' << g17(pt.tau.imag()) << ','
        << g17(pt.tau_ref.real()) << ',' << g17(pt.tau_ref.imag()) << ',' << g17(dev)
        << '\n';
    if (dev > 0.0) err_samples.push_back({std::log(pt.t), std::log(dev)});
  }
  em.add("fiber_tau.csv", csv.str());
  json j{{"max_deviation_from_reference", max_dev}};
  if (err_samples.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : err_samples) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double n = static_cast<double>(err_samples.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    j["error_decay_exponent"] = -slope;
  }
  const auto& info = case_info(id);
  if (info.model.alg_star && sweep.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& pt : sweep) {
      double x = std::log(pt.t), y = pt.tau.imag();
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double n = static_cast<double>(sweep.size());
    j["im_tau_log_slope"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  em.add("fiber_tau_fit.json", j.dump(2) + "\n");
}

void cmd_case_report(const RunConfig& cfg, Emitter& em) {
  CaseId id = require_case(cfg);
  em.add("case.json", case_to_json(case_info(id)).dump(2) + "\n");
  cmd_sk_sweep(cfg, em);
  cmd_fiber_tau(cfg, em);
  RunConfig rd = cfg;
  // the residual sweep has its own natural range within double range
  rd.t_start = std::min(cfg.t_start, 200.0);
  rd.t_stop = std::min(cfg.t_stop, 6400.0);
  rd.points = std::max(cfg.points, 6);
  cmd_residual_decay(rd, em);
}

int run(const RunConfig& cfg) {
  Emitter em(cfg.out_dir);
  if (cfg.command == "catalog") cmd_catalog(cfg, em);
  else if (cfg.command == "roots") cmd_roots(cfg, em);
  else if (cfg.command == "masses") cmd_masses(cfg, em);
  else if (cfg.command == "fiducial") cmd_fiducial(cfg, em);
  else if (cfg.command == "residual-decay") cmd_residual_decay(cfg, em);
  else if (cfg.command == "sk-sweep") cmd_sk_sweep(cfg, em);
  else if (cfg.command == "fiber-tau") cmd_fiber_tau(cfg, em);
  else if (cfg.command == "case-report") cmd_case_report(cfg, em);
  else throw std::invalid_argument("unknown command " + cfg.command);
  em.flush();
  return 0;
}

void write_error_json(const RunConfig& cfg, int code, const std::string& message) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) return;
  std::ofstream out(fs::path(cfg.out_dir) / "error.json", std::ios::binary);
  if (!out) return;
  out << json{{"error", {{"code", code}, {"message", message}}}}.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"asymptotic geometry of rank-two irregular Higgs-bundle moduli"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, double> mu_flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override)");
    sub->add_option("--case", cfg.case_name,
                    "case name (U4, T4, U3S, T3S, U2U2, U2T2, T2T2, U2SS, T2SS)");
    sub->add_option("--divisor", cfg.divisor_file, "base-point JSON file");
    sub->add_option("--t-start", cfg.t_start, "sweep start");
    sub->add_option("--t-stop", cfg.t_stop, "sweep stop");
    sub->add_option("--points", cfg.points, "sweep point count");
    sub->add_option("--spacing", cfg.spacing, "geometric | linear");
    for (const char* name : {"mu0", "mu1", "mu2", "mu3", "mu4", "mu5", "mu6", "mu7"})
      sub->add_option(std::string("--") + name, mu_flags[name],
                      std::string("parameter ") + name);
    sub->add_option("--kappa", cfg.kappa, "cutoff scale");
    sub->add_option("--quad-rel", cfg.quad_rel, "quadrature relative tolerance");
    sub->add_option("--alpha1", cfg.alpha1, "tame-pole weight alpha_1");
    sub->add_option("--rho-min", cfg.rho_min, "profile domain start");
    sub->add_option("--rho-max", cfg.rho_max, "profile domain end");
    sub->add_option("--grid-points", cfg.grid_points, "profile grid size");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--threads", cfg.threads, "worker threads (default 1)");
  };
  for (const char* name : {"catalog", "roots", "masses", "fiducial", "residual-decay",
                           "sk-sweep", "fiber-tau", "case-report"})
    add_common(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (!config_path.empty()) {
      RunConfig from_file = cfg;  // defaults
      apply_config_file(from_file, config_path);
      from_file.command = cfg.command;
      // flags override file values
      CLI::App* sub = app.get_subcommands().front();
      auto passed = [&](const std::string& flag) { return sub->count(flag) > 0; };
      if (passed("--case")) from_file.case_name = cfg.case_name;
      if (passed("--divisor")) from_file.divisor_file = cfg.divisor_file;
      if (passed("--t-start")) from_file.t_start = cfg.t_start;
      if (passed("--t-stop")) from_file.t_stop = cfg.t_stop;
      if (passed("--points")) from_file.points = cfg.points;
      if (passed("--spacing")) from_file.spacing = cfg.spacing;
      if (passed("--kappa")) from_file.kappa = cfg.kappa;
      if (passed("--quad-rel")) from_file.quad_rel = cfg.quad_rel;
      if (passed("--alpha1")) from_file.alpha1 = cfg.alpha1;
      if (passed("--rho-min")) from_file.rho_min = cfg.rho_min;
      if (passed("--rho-max")) from_file.rho_max = cfg.rho_max;
      if (passed("--grid-points")) from_file.grid_points = cfg.grid_points;
      if (passed("--out")) from_file.out_dir = cfg.out_dir;
      if (passed("--threads")) from_file.threads = cfg.threads;
      cfg = from_file;
    }
    {
      CLI::App* sub = app.get_subcommands().front();
      for (const auto& [name, value] : mu_flags)
        if (sub->count("--" + name) > 0) cfg.mus[name] = cplx(value, 0.0);
    }
    if (const char* env = std::getenv("HITCHIN_ASY_THREADS")) {
      CLI::App* sub = app.get_subcommands().front();
      if (sub->count("--threads") == 0) cfg.threads = std::atoi(env);
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_error_json(cfg, 2, e.what());
    return 2;
  }

  try {
    return run(cfg);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    write_error_json(cfg, 4, e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_error_json(cfg, 2, e.what());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    write_error_json(cfg, 3, e.what());
    return 3;
  }
}
