#ifndef BIPHOTON_VERSION_HPP
#define BIPHOTON_VERSION_HPP

namespace biphoton {

inline constexpr const char* kToolName = "bpsim";
inline constexpr const char* kToolVersion = "1.0.0";

} // namespace biphoton

#endif
