#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torsion/critical_points.hpp"

namespace torsion {

// Bit flags selecting the properties to certify.
enum Property : unsigned {
  kStarshape = 1u,     // P0
  kMultiplicity = 2u,  // P1
  kCurvature = 4u,     // P3
  kAllProperties = 7u,
};

struct VerifyOptions {
  int nx = kDefaultGridNx;
  int ny = kDefaultGridNy;
  double star_margin = 0.1;
};

struct CertificateSet {
  RootConfig config;
  AsymptoticPrediction prediction;
  unsigned requested = 0;

  std::optional<DomainExtract> domain;
  std::optional<ErrorKind> construction_error_kind;
  std::string construction_error;
  std::optional<RectNegativity> rect;

  std::optional<StarshapeCertificate> starshape;
  std::optional<MaximaCheck> maxima;
  std::string multiplicity_error;
  std::optional<CurvatureCertificate> curvature;
  std::string curvature_error;

  bool constructed() const { return domain.has_value(); }
  bool p0() const { return starshape && starshape->pass; }
  bool p1() const;
  bool p3() const { return curvature && curvature->pass; }
  // Every requested property passed.
  bool pass() const;
  // First requested property that failed, or empty.
  std::string failure_reason() const;
};

/// Extracts the domain and evaluates the requested certificates. With
/// stop_at_first_failure set, later properties are skipped once one fails.
CertificateSet certify(const RootConfig& config, unsigned properties,
                       const VerifyOptions& options = {}, bool stop_at_first_failure = false);

struct EpsilonTrial {
  double epsilon = 0.0;
  bool pass = false;
  std::string reason;
};

struct AutoEpsilon {
  std::optional<double> epsilon;  // first passing value
  double start = 0.0;             // eps_bound of the configuration
  std::vector<EpsilonTrial> trials;
};

inline constexpr int kAutoEpsilonSteps = 20;

/// Tries eps_bound / 2^n for n = 0, 1, ... until the required properties pass.
AutoEpsilon auto_epsilon(const RootConfig& base, unsigned required,
                         const VerifyOptions& options = {}, int max_steps = kAutoEpsilonSteps);

}  // namespace torsion
