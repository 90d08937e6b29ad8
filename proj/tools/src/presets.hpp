#pragma once

#include <string_view>

namespace apla::cli {

/// Text of the shipped configs/staghunt.json, captured at build time.
std::string_view staghunt_preset();

}  // namespace apla::cli
