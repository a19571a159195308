#ifndef ABCSPEC_VERSION_HPP
#define ABCSPEC_VERSION_HPP

namespace abcspec {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace abcspec

#endif  // ABCSPEC_VERSION_HPP
