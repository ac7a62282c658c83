#ifndef CPDCERT_ERRORS_HPP
#define CPDCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cpdcert {

/// Thrown when a combinatorial size (some C(n,k) or a derived product)
/// exceeds the configured cap. Callers should treat this as "refuse to
/// compute", not as a bug.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// Contract violations (bad shapes, invalid multi-indices, out-of-range m).
using domain_error = std::domain_error;

} // namespace cpdcert

#endif
