#include "torsion/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace torsion::report {

namespace {

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::string num(double v) { return fmt("%.17g", v); }
std::string svg_num(double v) { return fmt("%.6f", v); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json meta(std::initializer_list<std::pair<const char*, const char*>> entries) {
  json m = json::object();
  for (const auto& [k, v] : entries) m[k] = v;
  return m;
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

json config_json(const RootConfig& c, bool roots_defaulted) {
  return {{"k", c.k},
          {"roots", c.roots},
          {"roots_defaulted", roots_defaulted},
          {"epsilon", c.epsilon},
          {"alpha", c.alpha},
          {"_meta", meta({{"k", "number of peaks; the polynomial has degree 2k"},
                          {"roots", "strictly increasing real roots x_1 < ... < x_2k of the perturbation"},
                          {"epsilon", "perturbation size, dimensionless"},
                          {"alpha", "exponent of epsilon multiplying v = Re F"}})}};
}

json predictions_json(const AsymptoticPrediction& p) {
  return {{"x_enclosure", p.x_enclosure},
          {"rect", {p.rect.xmin, p.rect.xmax, p.rect.ymin, p.rect.ymax}},
          {"zeta_minus", p.zeta_minus},
          {"zeta_plus", p.zeta_plus},
          {"sup_neg_f", p.sup_neg_f},
          {"sup_neg_f_at", p.sup_neg_f_at},
          {"eps_bound", p.eps_bound},
          {"tip_abscissa", p.tip_abscissa},
          {"_meta",
           meta({{"x_enclosure", "half width (3/eps^alpha)^(1/2k) of the enclosing rectangle"},
                 {"rect", "enclosing rectangle [xmin, xmax, ymin, ymax]"},
                 {"zeta_minus", "predicted abscissa of the left curvature zero"},
                 {"zeta_plus", "predicted abscissa of the right curvature zero"},
                 {"sup_neg_f", "sup of -f between the outer roots"},
                 {"sup_neg_f_at", "abscissa attaining sup_neg_f"},
                 {"eps_bound", "(1 / (2 sup(-f)))^(1/alpha); sufficient-smallness scale for epsilon"},
                 {"tip_abscissa", "(1/2 / eps^alpha)^(1/2k); leading-order tip of the domain on y = 0"}})}};
}

json rect_json(const RectNegativity& r) {
  return {{"max_u", r.max_u},
          {"argmax", point_json(r.argmax)},
          {"pass", r.pass},
          {"max_u_vertical", r.max_u_vertical},
          {"vertical_pass", r.vertical_pass},
          {"vertical_deviation", r.vertical_deviation},
          {"_meta", meta({{"max_u", "max of u over the sampled rectangle boundary; negative means enclosed"},
                          {"argmax", "boundary point attaining max_u"},
                          {"max_u_vertical", "max of u on the two vertical sides"},
                          {"vertical_pass", "max_u_vertical <= -2 + 0.5"},
                          {"vertical_deviation", "max |u + 5/2 + y^2/2| on the vertical sides"}})}};
}

json starshape_json(const StarshapeCertificate& s) {
  return {{"center", point_json(s.center)},
          {"max_radial_derivative", s.max_radial_derivative},
          {"argmax", point_json(s.argmax)},
          {"margin", s.margin},
          {"pass", s.pass},
          {"_meta", meta({{"center", "star centre (x_1, 0)"},
                          {"max_radial_derivative", "max over the boundary of (p - center) . grad u"},
                          {"argmax", "boundary point attaining the maximum"},
                          {"margin", "pass iff max_radial_derivative <= -margin"}})}};
}

json multiplicity_json(const MaximaCheck& m) {
  return {{"k", m.k},
          {"count_maxima", m.count_maxima},
          {"component_count", m.component_count},
          {"maxima_per_component", m.maxima_per_component},
          {"pass", m.pass && m.component_count >= m.k},
          {"_meta", meta({{"k", "required number of peaks"},
                          {"count_maxima", "nondegenerate local maxima of u located inside the domain"},
                          {"component_count", "connected components of {u > 1/2} inside the domain"},
                          {"maxima_per_component", "located maxima in each component"},
                          {"pass", "count_maxima >= k and component_count >= k"}})}};
}

json curvature_json(const CurvatureCertificate& c) {
  json zeros = json::array();
  for (const Vec2& z : c.zero_locations) zeros.push_back(point_json(z));
  return {{"zero_count", c.zero_count},
          {"zero_count_refined", c.zero_count_refined},
          {"zero_locations", zeros},
          {"min_curvature", c.min_curvature},
          {"min_location", point_json(c.min_location)},
          {"max_curvature", c.max_curvature},
          {"predicted_zeros", c.predicted_zeros},
          {"zero_relative_errors", c.zero_relative_errors},
          {"bottom_point", c.bottom_point ? point_json(*c.bottom_point) : json(nullptr)},
          {"bottom_curvature", optional_number(c.bottom_curvature)},
          {"pass", c.pass},
          {"_meta", meta({{"zero_count", "sign changes of the boundary curvature at the traced vertices"},
                          {"zero_count_refined", "sign changes at doubled vertex density"},
                          {"zero_locations", "boundary points where the curvature vanishes"},
                          {"min_curvature", "minimum signed curvature of the boundary, 1/length"},
                          {"min_location", "boundary point of minimum curvature"},
                          {"max_curvature", "maximum signed curvature of the boundary, 1/length"},
                          {"bottom_point", "boundary point on x = 0 below the axis"},
                          {"predicted_zeros", "asymptotic abscissae of the curvature zeros"},
                          {"zero_relative_errors", "|measured - predicted| / |predicted| per zero"},
                          {"bottom_curvature", "curvature at the boundary point on x = 0, y < 0"},
                          {"pass", "exactly two sign changes at both densities"}})}};
}

json critical_points_json(const std::vector<CriticalPoint>& points) {
  json list = json::array();
  for (const CriticalPoint& p : points) {
    list.push_back({{"location", point_json(p.location)},
                    {"kind", to_string(p.kind)},
                    {"hessian_eigenvalues", {p.hessian_eigenvalues[0], p.hessian_eigenvalues[1]}},
                    {"value", p.value},
                    {"residual", p.residual}});
  }
  return {{"points", list},
          {"_meta", meta({{"location", "critical point (x, y)"},
                          {"kind", "Morse type from Hessian eigenvalue signs"},
                          {"hessian_eigenvalues", "ascending eigenvalues of the Hessian of u"},
                          {"value", "u at the point"},
                          {"residual", "|grad u| at the point"}})}};
}

json auto_epsilon_json(const AutoEpsilon& a) {
  json trials = json::array();
  for (const EpsilonTrial& t : a.trials) {
    trials.push_back({{"epsilon", t.epsilon}, {"pass", t.pass}, {"reason", t.reason}});
  }
  return {{"mode", "auto"},
          {"start", a.start},
          {"selected", optional_number(a.epsilon)},
          {"trials", trials},
          {"_meta", meta({{"start", "eps_bound; the search halves epsilon from here"},
                          {"selected", "first epsilon at which the required certificates pass"},
                          {"trials", "every epsilon tried with its first failing property"}})}};
}

json domain_json(const DomainExtract& d) {
  const Rect b = d.boundary.bounds();
  return {{"anchor", point_json(d.anchor)},
          {"boundary_vertices", d.boundary.size()},
          {"enclosed_area", d.boundary.signed_area()},
          {"mask_area", d.mask_area()},
          {"boundary_length", d.boundary.length()},
          {"bounds", {b.xmin, b.xmax, b.ymin, b.ymax}},
          {"_meta", meta({{"anchor", "seed point of the component, (x_1, 0)"},
                          {"boundary_vertices", "vertices of the traced boundary polygon"},
                          {"enclosed_area", "signed polygon area, positive for counterclockwise"},
                          {"mask_area", "area of the flood-filled lattice cells"},
                          {"boundary_length", "perimeter of the boundary polygon"},
                          {"bounds", "[xmin, xmax, ymin, ymax] of the boundary"}})}};
}

json certificates_json(const CertificateSet& c) {
  json out;
  json construction = {{"status", c.constructed() ? "ok" : "error"}};
  if (c.rect) construction["rect_negativity"] = rect_json(*c.rect);
  if (c.constructed()) {
    construction["domain"] = domain_json(*c.domain);
  } else {
    construction["error"] = error_json(
        c.construction_error_kind ? to_string(*c.construction_error_kind) : "unknown", c.construction_error);
  }
  out["construction"] = construction;

  json certs = json::object();
  if (!c.constructed()) {
    for (auto [flag, name] : {std::pair{kStarshape, "P0"}, {kMultiplicity, "P1"}, {kCurvature, "P3"}}) {
      if (c.requested & flag) certs[name] = {{"status", "not-evaluated"}};
    }
    out["certificates"] = certs;
    out["all_pass"] = false;
    return out;
  }
  if (c.requested & kStarshape) certs["P0"] = c.starshape ? starshape_json(*c.starshape) : json(nullptr);
  if (c.requested & kMultiplicity) {
    certs["P1"] = c.maxima ? multiplicity_json(*c.maxima) : error_json("multiplicity", c.multiplicity_error);
    if (c.maxima) out["critical_points"] = critical_points_json(c.maxima->points);
  }
  if (c.requested & kCurvature) {
    certs["P3"] = c.curvature ? curvature_json(*c.curvature) : error_json("curvature", c.curvature_error);
  }
  out["certificates"] = certs;
  out["all_pass"] = c.pass();
  return out;
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"kind", kind}, {"message", message}};
}

std::string boundary_csv(const Contour& b) {
  std::string out = "x,y,curvature,radial_derivative,grad_norm\n";
  const bool annotated = b.curvature.size() == b.size();
  for (std::size_t i = 0; i < b.size(); ++i) {
    out += num(b.vertices[i].x) + ',' + num(b.vertices[i].y) + ',';
    if (annotated) {
      out += num(b.curvature[i]) + ',' + num(b.radial_derivative[i]) + ',' + num(b.grad_norm[i]);
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

std::string mask_pgm(const Mask& mask) {
  std::string out = "P5\n" + std::to_string(mask.nx()) + ' ' + std::to_string(mask.ny()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(mask.nx()) * mask.ny());
  for (int j = mask.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < mask.nx(); ++i) out += static_cast<char>(mask.at(i, j) ? 255 : 0);
  }
  return out;
}

std::string field_csv(const pde::IrregularGrid& grid, const std::vector<double>& values) {
  std::string out = "x,y,value\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out += num(grid.nodes[k].x) + ',' + num(grid.nodes[k].y) + ',' + num(values[k]) + '\n';
  }
  return out;
}

std::string field_pgm(const pde::IrregularGrid& grid, const std::vector<double>& values) {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  for (const auto& [i, j] : grid.ij) {
    i0 = std::min(i0, i), i1 = std::max(i1, i), j0 = std::min(j0, j), j1 = std::max(j1, j);
  }
  const int nx = i1 - i0 + 1, ny = j1 - j0 + 1;
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  std::vector<unsigned char> pixels(static_cast<std::size_t>(nx) * ny, 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = top > 0.0 ? std::clamp(values[k] / top, 0.0, 1.0) : 0.0;
    pixels[static_cast<std::size_t>(j1 - grid.ij[k][1]) * nx + (grid.ij[k][0] - i0)] =
        static_cast<unsigned char>(std::lround(255.0 * t));
  }
  std::string out = "P5\n" + std::to_string(nx) + ' ' + std::to_string(ny) + "\n255\n";
  out.append(pixels.begin(), pixels.end());
  return out;
}

std::string domain_svg(const DomainExtract& domain, const std::vector<Contour>& level_curves,
                       const RootConfig& config) {
  const Rect b = domain.boundary.bounds();
  const double pad = 0.04 * std::max(b.width(), b.height());
  const double x0 = b.xmin - pad, y0 = b.ymin - pad;
  const double w = b.width() + 2 * pad, h = b.height() + 2 * pad;
  const double stroke = 0.0015 * std::max(w, h);
  const double px_width = 1200.0;

  auto path = [](const Contour& c) {
    std::string d;
    for (std::size_t i = 0; i < c.size(); ++i) {
      d += (i == 0 ? "M" : "L") + svg_num(c.vertices[i].x) + ',' + svg_num(-c.vertices[i].y) + ' ';
    }
    if (c.closed) d += 'Z';
    return d;
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(px_width) << "\" height=\""
    << svg_num(px_width * h / w) << "\" viewBox=\"" << svg_num(x0) << ' ' << svg_num(-(y0 + h)) << ' '
    << svg_num(w) << ' ' << svg_num(h) << "\">\n";
  s << "<title>k=" << config.k << " epsilon=" << num(config.epsilon) << "</title>\n";
  s << "<rect x=\"" << svg_num(x0) << "\" y=\"" << svg_num(-(y0 + h)) << "\" width=\"" << svg_num(w)
    << "\" height=\"" << svg_num(h) << "\" fill=\"white\"/>\n";
  for (double y : {-1.0, 1.0}) {
    s << "<line x1=\"" << svg_num(x0) << "\" y1=\"" << svg_num(-y) << "\" x2=\"" << svg_num(x0 + w)
      << "\" y2=\"" << svg_num(-y) << "\" stroke=\"#999999\" stroke-width=\"" << svg_num(stroke / 2)
      << "\" stroke-dasharray=\"" << svg_num(4 * stroke) << "\"/>\n";
  }
  s << "<path d=\"" << path(domain.boundary) << "\" fill=\"#dbe9f6\" stroke=\"#1f4e79\" stroke-width=\""
    << svg_num(stroke) << "\"/>\n";
  for (const Contour& c : level_curves) {
    s << "<path d=\"" << path(c) << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\""
      << svg_num(stroke) << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidInput, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

Manifest::Manifest(std::string command, std::filesystem::path directory)
    : command_(std::move(command)), directory_(std::move(directory)),
      start_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(directory_);
}

std::filesystem::path Manifest::write(const std::string& name, const std::string& content) {
  const std::filesystem::path p = directory_ / name;
  std::ofstream f(p, std::ios::binary);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + p.string());
  artifacts_.push_back({{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  return p;
}

void Manifest::record_external(const std::string& what) {
  artifacts_.push_back({{"path", what}, {"sha256", nullptr}, {"bytes", nullptr}});
}

std::filesystem::path Manifest::finish() {
  times_["total"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  json m = extra_;
  m["schema_version"] = kSchemaVersion;
  m["command"] = command_;
  m["artifacts"] = artifacts_;
  m["wall_times"] = times_;
  m["_meta"] = meta({{"artifacts", "files written by the run with SHA-256 of their bytes"},
                     {"wall_times", "elapsed seconds per phase"}});
  const std::filesystem::path p = directory_ / (command_ + "-manifest.json");
  std::ofstream f(p);
  f << m.dump(2) << '\n';
  return p;
}

}  // namespace torsion::report
