#include "torsion/types.hpp"

namespace torsion {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::DegeneratePoint: return "degenerate-point";
    case ErrorKind::ConstructionFailed: return "construction-failed";
    case ErrorKind::EnclosureViolation: return "enclosure-violation";
    case ErrorKind::Indeterminate: return "indeterminate";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::NoSolution: return "no-solution-found";
    case ErrorKind::EigenFailure: return "eigenvalue-failure";
    case ErrorKind::Inconsistency: return "inconsistency";
    case ErrorKind::CertificateFailure: return "certificate-failure";
  }
  return "unknown";
}

}  // namespace torsion
