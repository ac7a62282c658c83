#ifndef CPDCERT_VERSION_HPP
#define CPDCERT_VERSION_HPP

namespace cpdcert {

inline constexpr const char* kVersion = "0.1.0";

} // namespace cpdcert

#endif
