#pragma once

#include <optional>
#include <string_view>

#include "arsip/kernels.hpp"

// Per-element work shared by the serial and OpenMP kernels.
namespace arsip::kernels::detail {

std::size_t distance_one(const StringPair& p, Algorithm algo);

std::optional<std::size_t> bounded_one(std::u32string_view query, std::u32string_view candidate,
                                       std::size_t k);

}  // namespace arsip::kernels::detail
