#include "torsion/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "torsion/parallel.hpp"
#include "torsion/report.hpp"

namespace torsion::cli {

namespace {

using report::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  int k = 2;
  CLI::Option* k_option = nullptr;
  std::string roots;
  std::string epsilon;
  double alpha = 1.5;
  std::string out_dir;
  std::string json_path;
  int jobs = 0;
  int nx = kDefaultGridNx;
  int ny = kDefaultGridNy;
  // sweep
  std::string epsilons = "1e-2,1e-3,1e-4";
  double strip_half_width = 2.0;
  // pde
  std::string domain = "construction";
  std::string spacings = "0.1,0.05,0.025,0.0125";
  std::string nonlinearity;
  std::string lambdas = "0.2,0.1,0.05,0.025";
  double study_spacing = 0.05;
  std::string lambda_search;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) {
      throw UsageError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct Setup {
  RootConfig config;
  bool roots_defaulted = false;
  json epsilon_selection;
  std::vector<std::string> warnings;
};

// Roots, k and epsilon from the flags; auto epsilon searches with `required`.
Setup resolve(const Flags& f, unsigned required, const std::string& default_epsilon,
              report::Manifest& manifest) {
  Setup s;
  RootConfig& c = s.config;
  c.alpha = f.alpha;
  if (f.roots.empty()) {
    c.k = f.k;
    if (c.k < 2) throw UsageError("--k must be at least 2");
    c.roots = RootConfig::canonical_roots(c.k);
    s.roots_defaulted = true;
  } else {
    c.roots = parse_list(f.roots, "--roots");
    c.k = f.k_option && f.k_option->count() ? f.k : static_cast<int>(c.roots.size() / 2);
  }
  const std::string eps = f.epsilon.empty() ? default_epsilon : f.epsilon;
  const VerifyOptions options{f.nx, f.ny};
  if (eps == "auto") {
    c.epsilon = 1.0;
    c.validate();
    const auto t = std::chrono::steady_clock::now();
    const AutoEpsilon a = auto_epsilon(c, required, options);
    manifest.time_phase("auto_epsilon", seconds_since(t));
    s.epsilon_selection = report::auto_epsilon_json(a);
    c.epsilon = a.epsilon ? *a.epsilon : a.trials.back().epsilon;
    if (!a.epsilon) s.warnings.push_back("auto epsilon search found no passing value");
  } else {
    c.epsilon = parse_list(eps, "--epsilon").front();
    s.epsilon_selection = {{"mode", "fixed"}, {"selected", c.epsilon},
                           {"_meta", report::meta({{"selected", "epsilon given on the command line"}})}};
  }
  c.validate();
  const double bound = predictions(c).eps_bound;
  if (c.epsilon > bound) {
    std::ostringstream w;
    w << "epsilon " << c.epsilon << " exceeds eps_bound " << bound;
    s.warnings.push_back(w.str());
  }
  manifest.set("config", report::config_json(c, s.roots_defaulted));
  return s;
}

json base_report(const std::string& command, const Setup& s) {
  return {{"schema_version", report::kSchemaVersion},
          {"command", command},
          {"config", report::config_json(s.config, s.roots_defaulted)},
          {"epsilon_selection", s.epsilon_selection},
          {"predictions", report::predictions_json(predictions(s.config))},
          {"warnings", s.warnings}};
}

void emit(const json& body, const Flags& f, const std::string& command, report::Manifest& manifest,
          std::ostream& out) {
  const std::string text = body.dump(2) + "\n";
  if (f.json_path == "-") {
    out << text;
    manifest.record_external("stdout");
  } else {
    manifest.write(f.json_path.empty() ? command + ".json" : f.json_path, text);
  }
}

json grid_json(const GridWindow& w) {
  return {{"xmin", w.xmin}, {"xmax", w.xmax}, {"ymin", w.ymin}, {"ymax", w.ymax},
          {"nx", w.nx},     {"ny", w.ny}};
}

int cmd_construct(const Flags& f, report::Manifest& m, std::ostream& out, std::ostream& err) {
  Setup s = resolve(f, kStarshape, "auto", m);
  for (const auto& w : s.warnings) err << "warning: " << w << '\n';
  const RootConfig& c = s.config;
  const auto t = std::chrono::steady_clock::now();
  const CertificateSet cert = certify(c, kStarshape, {f.nx, f.ny});
  m.time_phase("extract", seconds_since(t));
  json body = base_report("construct", s);
  m.set("window", grid_json(default_window(c, f.nx, f.ny)));
  m.set("tolerances", {{"refine_tol", 1e-10}, {"star_margin", 0.1}});
  if (!cert.constructed()) {
    body["error"] = report::error_json(to_string(*cert.construction_error_kind), cert.construction_error);
    if (cert.rect) body["rect_negativity"] = report::rect_json(*cert.rect);
    emit(body, f, "construct", m, out);
    err << "error: " << cert.construction_error << '\n';
    return kExitConstructionError;
  }
  const ImplicitField field(c);
  Contour boundary = cert.domain->boundary;
  annotate(boundary, field, c.roots.front());

  // Level-1/2 curves live in a thin band around the roots.
  const GridWindow band{c.roots.front() - 0.5, c.roots.back() + 0.5, -0.25, 0.25, 2048, 256};
  std::vector<Contour> half;
  for (Contour& curve : extract_level_set(field, 0.5, band)) {
    if (curve.closed && cert.domain->contains(curve.vertices.front())) half.push_back(std::move(curve));
  }
  body["domain"] = report::domain_json(*cert.domain);
  body["rect_negativity"] = report::rect_json(*cert.rect);
  body["starshape"] = report::starshape_json(*cert.starshape);
  body["level_half"] = {{"curves", half.size()},
                        {"_meta", report::meta({{"curves", "closed components of {u = 1/2} inside the domain"}})}};
  m.write("boundary.csv", report::boundary_csv(boundary));
  m.write("mask.pgm", report::mask_pgm(cert.domain->inside));
  m.write("domain.svg", report::domain_svg(*cert.domain, half, c));
  body["artifacts"] = {"boundary.csv", "mask.pgm", "domain.svg"};
  emit(body, f, "construct", m, out);
  return kExitOk;
}

int cmd_verify(const Flags& f, report::Manifest& m, std::ostream& out, std::ostream& err) {
  Setup s = resolve(f, kAllProperties, "auto", m);
  for (const auto& w : s.warnings) err << "warning: " << w << '\n';
  const auto t = std::chrono::steady_clock::now();
  const CertificateSet cert = certify(s.config, kAllProperties, {f.nx, f.ny});
  m.time_phase("certify", seconds_since(t));
  m.set("window", grid_json(default_window(s.config, f.nx, f.ny)));
  m.set("tolerances", {{"refine_tol", 1e-10}, {"star_margin", 0.1}, {"newton_tol", 1e-12}});
  json body = base_report("verify", s);
  body.update(report::certificates_json(cert));
  emit(body, f, "verify", m, out);
  if (!cert.constructed()) {
    err << "error: " << cert.construction_error << '\n';
    return kExitConstructionError;
  }
  if (!cert.pass()) {
    err << "certificate failed: " << cert.failure_reason() << '\n';
    return kExitCertificateFailed;
  }
  return kExitOk;
}

bool strictly_decreasing(const std::vector<std::optional<double>>& v, bool require_all) {
  std::optional<double> prev;
  for (const auto& x : v) {
    if (!x) {
      if (require_all) return false;
      continue;
    }
    if (prev && !(*x < *prev)) return false;
    prev = x;
  }
  return true;
}

int cmd_sweep(const Flags& f, report::Manifest& m, std::ostream& out, std::ostream& err) {
  Flags fixed = f;
  fixed.epsilon = "1";  // placeholder; per-entry values below
  Setup s = resolve(fixed, 0, "1", m);
  std::vector<double> eps = parse_list(f.epsilons, "--epsilons");
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

  std::vector<json> entries(eps.size());
  std::vector<std::optional<double>> curv(eps.size()), haus(eps.size());
  const auto t = std::chrono::steady_clock::now();
  parallel_for(eps.size(), [&](std::size_t i) {
    RootConfig c = s.config;
    c.epsilon = eps[i];
    json e = {{"epsilon", eps[i]}};
    try {
      c.validate();
      const ImplicitField field(c);
      const StripDistance d = strip_hausdorff(field, f.strip_half_width);
      haus[i] = d.hausdorff;
      e["hausdorff"] = d.hausdorff;
      const CertificateSet cert = certify(c, kStarshape | kCurvature, {f.nx, f.ny});
      e["rect_max_u"] = cert.rect->max_u;
      if (!cert.constructed()) {
        e["status"] = "error";
        e["error"] = report::error_json(to_string(*cert.construction_error_kind), cert.construction_error);
      } else {
        e["status"] = "ok";
        e["max_radial_derivative"] = cert.starshape->max_radial_derivative;
        e["starshape_pass"] = cert.starshape->pass;
        if (cert.curvature) {
          curv[i] = cert.curvature->min_curvature;
          e["min_curvature"] = cert.curvature->min_curvature;
          e["curvature_zero_count"] = cert.curvature->zero_count;
          e["curvature_pass"] = cert.curvature->pass;
        } else {
          e["status"] = "error";
          e["error"] = report::error_json("curvature", cert.curvature_error);
        }
      }
    } catch (const Error& ex) {
      e["status"] = "error";
      e["error"] = report::error_json(to_string(ex.kind()), ex.what());
    }
    entries[i] = std::move(e);
  });
  m.time_phase("sweep", seconds_since(t));

  std::vector<std::optional<double>> abs_curv(curv.size());
  for (std::size_t i = 0; i < curv.size(); ++i) {
    if (curv[i]) abs_curv[i] = std::abs(*curv[i]);
  }
  int failed = 0;
  for (const json& e : entries) failed += e["status"] == "error";
  json body = base_report("sweep", s);
  body.erase("epsilon_selection");
  body["config"].erase("epsilon");
  body["entries"] = entries;
  body["_meta"] = report::meta(
      {{"entries",
        "one object per epsilon, largest first: hausdorff = distance between {u = 0} and y = +-1 within "
        "|x| <= strip_half_width; rect_max_u = max of u on the enclosing rectangle boundary; "
        "max_radial_derivative = max over the boundary of (p - (x_1, 0)) . grad u; min_curvature = "
        "minimum signed boundary curvature; curvature_zero_count = its sign changes"},
       {"trends", "monotonicity flags over the entries"}});
  body["trends"] = {
      {"min_curvature_decreasing", strictly_decreasing(abs_curv, true)},
      {"min_curvature_decreasing_where_available", strictly_decreasing(abs_curv, false)},
      {"hausdorff_decreasing", strictly_decreasing(haus, true)},
      {"failed_entries", failed},
      {"strip_half_width", f.strip_half_width},
      {"_meta", report::meta({{"min_curvature_decreasing", "|min curvature| strictly decreases as epsilon decreases, every entry present"},
                              {"min_curvature_decreasing_where_available", "same, skipping entries without a value"},
                              {"hausdorff_decreasing", "strip distance strictly decreases as epsilon decreases"},
                              {"failed_entries", "entries that reported an error"},
                              {"strip_half_width", "half width of the window used for hausdorff"}})}};
  for (const json& e : entries) {
    if (e["status"] == "error") err << "entry epsilon=" << e["epsilon"] << ": " << e["error"]["message"] << '\n';
  }
  emit(body, f, "sweep", m, out);
  return kExitOk;
}

int cmd_pde(const Flags& f, report::Manifest& m, std::ostream& out, std::ostream& err) {
  std::optional<pde::Nonlinearity> nl;
  if (!f.nonlinearity.empty()) {
    try {
      nl = pde::nonlinearity_by_name(f.nonlinearity);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  const std::vector<double> spacings = parse_list(f.spacings, "--spacings");
  const std::vector<double> lambdas = parse_list(f.lambdas, "--lambda");
  std::optional<std::pair<double, double>> search;
  if (!f.lambda_search.empty()) {
    const auto r = parse_list(f.lambda_search, "--lambda-search");
    if (r.size() != 2 || !(r[0] > 0.0 && r[0] < r[1])) throw UsageError("--lambda-search needs LO,HI with 0 < LO < HI");
    search = std::pair{r[0], r[1]};
  }
  if (f.domain != "construction" && f.domain != "disk") throw UsageError("--domain must be construction or disk");

  json body;
  std::unique_ptr<ScalarField> exact;
  pde::DomainFunction phi;
  Vec2 anchor;
  Rect box;
  if (f.domain == "disk") {
    exact = std::make_unique<DiskTorsionField>();
    body = {{"schema_version", report::kSchemaVersion}, {"command", "pde"}, {"domain", "disk"}};
    anchor = {0.0, 0.0};
    box = {-1.0, 1.0, -1.0, 1.0};
  } else {
    Setup s = resolve(f, kStarshape, "1e-3", m);
    for (const auto& w : s.warnings) err << "warning: " << w << '\n';
    body = base_report("pde", s);
    body["domain"] = "construction";
    auto field = std::make_unique<ImplicitField>(s.config);
    try {
      const DomainExtract d = extract_domain(*field, default_window(s.config, f.nx, f.ny));
      anchor = d.anchor;
      box = d.boundary.bounds();
    } catch (const Error& e) {
      body["error"] = report::error_json(to_string(e.kind()), e.what());
      emit(body, f, "pde", m, out);
      err << "error: " << e.what() << '\n';
      return kExitConstructionError;
    }
    exact = std::move(field);
  }
  const ScalarField& u_exact = *exact;
  phi = [&u_exact](double x, double y) { return u_exact.value(x, y); };

  try {
    auto t = std::chrono::steady_clock::now();
    const pde::OrderStudy study = pde::torsion_order_study(phi, anchor, box, u_exact, spacings);
    m.time_phase("torsion_study", seconds_since(t));
    json rows = json::array();
    for (const auto& e : study.entries) {
      rows.push_back({{"spacing", e.spacing}, {"nodes", e.nodes}, {"max_error", e.max_error}, {"residual", e.residual}});
    }
    body["torsion"] = {{"entries", rows},
                       {"pairwise_orders", study.pairwise_orders},
                       {"observed_order", study.observed_order},
                       {"_meta", report::meta({{"entries", "one object per spacing"},
                                               {"spacing", "lattice spacing h"},
                                               {"nodes", "interior unknowns"},
                                               {"max_error", "max over nodes of |u_h - u| against the explicit solution"},
                                               {"residual", "max |A u - b| / max |b|"},
                                               {"pairwise_orders", "log(e_i / e_i+1) / log(h_i / h_i+1)"},
                                               {"observed_order", "least-squares slope of log error against log h"}})}};

    const pde::IrregularGrid grid = pde::build_grid(phi, anchor, box, f.study_spacing);
    const pde::DiscreteField u0 = pde::solve_torsion(grid);
    m.write("torsion_field.csv", report::field_csv(grid, u0.values));
    m.write("torsion_field.pgm", report::field_pgm(grid, u0.values));

    if (nl) {
      t = std::chrono::steady_clock::now();
      const pde::ConvergenceStudy cs = pde::convergence_study(grid, *nl, lambdas);
      m.time_phase("semilinear_study", seconds_since(t));
      json rows2 = json::array();
      for (const auto& e : cs.entries) {
        json r = {{"lambda", e.lambda}};
        r["sup_error"] = e.sup_error ? json(*e.sup_error) : json(nullptr);
        if (e.stability) {
          r["lambda_min"] = e.stability->lambda_min;
          r["semistable"] = e.stability->pass;
        }
        if (!e.error.empty()) r["error"] = e.error;
        rows2.push_back(r);
      }
      body["semilinear"] = {
          {"nonlinearity", nl->name},
          {"spacing", f.study_spacing},
          {"entries", rows2},
          {"monotone", cs.monotone},
          {"torsion_sup", cs.torsion_sup},
          {"_meta", report::meta({{"entries", "one object per lambda"},
                                  {"lambda", "load parameter"},
                                  {"spacing", "lattice spacing of the study grid"},
                                  {"sup_error", "max over nodes of |u_lambda / (lambda f(0)) - u_0|"},
                                  {"lambda_min", "smallest eigenvalue of the linearised operator"},
                                  {"semistable", "lambda_min >= -1e-8"},
                                  {"monotone", "sup_error decreases along the lambda list"},
                                  {"torsion_sup", "max of the discrete torsion solution u_0"}})}};

      if (search) {
        auto ok = [&](double lambda) {
          try {
            const pde::NonlinearProblem p(*nl, lambda);
            const pde::DiscreteField u = pde::solve_semilinear(grid, p);
            return u.positive && pde::semistability(grid, p, u).pass;
          } catch (const Error&) {
            return false;
          }
        };
        auto [lo, hi] = *search;
        json bar = {{"range", {lo, hi}}};
        if (!ok(lo)) {
          bar["lambda_bar"] = nullptr;
        } else if (ok(hi)) {
          bar["lambda_bar"] = hi;
        } else {
          for (int it = 0; it < 30 && hi - lo > 1e-6 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
          }
          bar["lambda_bar"] = lo;
        }
        bar["_meta"] = report::meta({{"lambda_bar", "largest lambda in range found with a positive semi-stable solution"},
                                     {"range", "[LO, HI] searched by bisection"}});
        body["lambda_search"] = bar;
      }
    }
  } catch (const Error& e) {
    body["error"] = report::error_json(to_string(e.kind()), e.what());
    emit(body, f, "pde", m, out);
    err << "error: " << e.what() << '\n';
    return kExitCertificateFailed;
  }
  emit(body, f, "pde", m, out);
  return kExitOk;
}

void add_config_flags(CLI::App* app, Flags& f, const std::string& epsilon_default) {
  f.k_option = app->add_option("--k", f.k, "number of peaks (default 2)");
  app->add_option("--roots", f.roots, "comma-separated increasing roots; default +-(2j-1)");
  app->add_option("--epsilon", f.epsilon, "perturbation size or 'auto' (default " + epsilon_default + ")");
  app->add_option("--alpha", f.alpha, "exponent of epsilon on the harmonic term");
  app->add_option("--nx", f.nx, "extraction lattice columns")->check(CLI::Range(16, 1 << 16));
  app->add_option("--ny", f.ny, "extraction lattice rows")->check(CLI::Range(16, 1 << 16));
}

void add_output_flags(CLI::App* app, Flags& f) {
  app->add_option("--out", f.out_dir, std::string("output directory (default $") + kOutputDirEnv + " or " +
                                          kDefaultOutputDir + ")");
  app->add_option("--json", f.json_path, "report path relative to --out, or - for standard output");
  app->add_option("--jobs", f.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Multi-peak torsion landscapes: construct, certify and cross-validate"};
  app.name("torsion-landscape");
  app.require_subcommand(1);
  auto* construct = app.add_subcommand("construct", "extract the domain and write CSV, PGM and SVG");
  auto* verify = app.add_subcommand("verify", "certify starshapedness, multiplicity and curvature zeros");
  auto* sweep = app.add_subcommand("sweep", "trend report over a list of epsilons");
  auto* pdecmd = app.add_subcommand("pde", "finite-difference cross-validation and semilinear study");
  for (auto* sub : {construct, verify, sweep, pdecmd}) add_output_flags(sub, f);
  add_config_flags(construct, f, "auto");
  add_config_flags(verify, f, "auto");
  add_config_flags(sweep, f, "per entry");
  add_config_flags(pdecmd, f, "1e-3");
  sweep->add_option("--epsilons", f.epsilons, "comma-separated epsilons");
  sweep->add_option("--strip-half-width", f.strip_half_width, "half width of the strip window");
  pdecmd->add_option("--domain", f.domain, "construction or disk");
  pdecmd->add_option("--spacings", f.spacings, "comma-separated lattice spacings for the torsion study");
  pdecmd->add_option("--nonlinearity", f.nonlinearity, "const, linear or exp");
  pdecmd->add_option("--lambda", f.lambdas, "comma-separated decreasing lambdas");
  pdecmd->add_option("--study-spacing", f.study_spacing, "lattice spacing of the semilinear study");
  pdecmd->add_option("--lambda-search", f.lambda_search, "LO,HI range for the semi-stability threshold search");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string dir = f.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir = env && *env ? env : kDefaultOutputDir;
  }
  set_thread_limit(static_cast<std::size_t>(f.jobs));

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  std::map<std::string, std::function<int(const Flags&, report::Manifest&, std::ostream&, std::ostream&)>>
      commands{{"construct", cmd_construct}, {"verify", cmd_verify}, {"sweep", cmd_sweep}, {"pde", cmd_pde}};
  try {
    report::Manifest manifest(command, dir);
    std::vector<std::string> echoed(args.begin(), args.end());
    manifest.set("argv", echoed);
    manifest.set("resolutions", {{"nx", f.nx}, {"ny", f.ny}});
    const int code = commands.at(command)(f, manifest, out, err);
    manifest.set("exit_code", code);
    manifest.finish();
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    const json body = {{"schema_version", report::kSchemaVersion},
                       {"command", command},
                       {"error", report::error_json(to_string(e.kind()), e.what())}};
    err << "error: " << e.what() << '\n';
    if (f.json_path == "-") out << body.dump(2) << '\n';
    return kExitConstructionError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConstructionError;
  }
}

}  // namespace torsion::cli
