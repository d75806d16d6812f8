#pragma once

namespace bosegas {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bosegas
