#include "torsion/certify.hpp"

namespace torsion {

namespace {

std::string describe(const Error& e) { return std::string(to_string(e.kind())) + ": " + e.what(); }

}  // namespace

bool CertificateSet::p1() const {
  return maxima && maxima->pass && maxima->component_count >= config.k;
}

bool CertificateSet::pass() const {
  if (!constructed()) return false;
  if ((requested & kStarshape) && !p0()) return false;
  if ((requested & kMultiplicity) && !p1()) return false;
  if ((requested & kCurvature) && !p3()) return false;
  return true;
}

std::string CertificateSet::failure_reason() const {
  if (!constructed()) return construction_error;
  if ((requested & kStarshape) && !p0()) {
    return starshape ? "P0: max radial derivative " + std::to_string(starshape->max_radial_derivative)
                     : "P0: not evaluated";
  }
  if ((requested & kMultiplicity) && !p1()) {
    if (!multiplicity_error.empty()) return "P1: " + multiplicity_error;
    return maxima ? "P1: " + std::to_string(maxima->count_maxima) + " maxima, " +
                        std::to_string(maxima->component_count) + " components"
                  : "P1: not evaluated";
  }
  if ((requested & kCurvature) && !p3()) {
    if (!curvature_error.empty()) return "P3: " + curvature_error;
    return curvature ? "P3: " + std::to_string(curvature->zero_count) + " curvature sign changes"
                     : "P3: not evaluated";
  }
  return {};
}

CertificateSet certify(const RootConfig& config, unsigned properties, const VerifyOptions& options,
                       bool stop_at_first_failure) {
  CertificateSet out;
  out.config = config;
  out.requested = properties;
  out.prediction = predictions(config);
  const ImplicitField field(config);
  out.rect = check_rect_negativity(field, out.prediction);
  try {
    out.domain = extract_domain(field, default_window(config, options.nx, options.ny));
  } catch (const Error& e) {
    out.construction_error_kind = e.kind();
    out.construction_error = describe(e);
    return out;
  }
  const DomainExtract& domain = *out.domain;
  const double center = config.roots.front();

  if (properties & kStarshape) {
    out.starshape = starshape_certificate(domain, field, center, options.star_margin);
    if (stop_at_first_failure && !out.p0()) return out;
  }
  if (properties & kMultiplicity) {
    try {
      out.maxima = maxima_count_vs_k(field, domain);
    } catch (const Error& e) {
      out.multiplicity_error = describe(e);
    }
    if (stop_at_first_failure && !out.p1()) return out;
  }
  if (properties & kCurvature) {
    try {
      out.curvature = curvature_certificate(domain, field, &out.prediction);
    } catch (const Error& e) {
      out.curvature_error = describe(e);
    }
  }
  return out;
}

AutoEpsilon auto_epsilon(const RootConfig& base, unsigned required, const VerifyOptions& options,
                         int max_steps) {
  AutoEpsilon out;
  out.start = predictions(base).eps_bound;
  RootConfig config = base;
  double eps = out.start;
  for (int step = 0; step < max_steps; ++step, eps *= 0.5) {
    config.epsilon = eps;
    const CertificateSet c = certify(config, required, options, true);
    out.trials.push_back({eps, c.pass(), c.failure_reason()});
    if (c.pass()) {
      out.epsilon = eps;
      break;
    }
  }
  return out;
}

}  // namespace torsion
