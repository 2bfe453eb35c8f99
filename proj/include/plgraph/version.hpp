#pragma once

#include <string_view>

namespace plgraph {

inline constexpr std::string_view kToolName = "plgraph";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace plgraph
