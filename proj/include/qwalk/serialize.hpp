#pragma once

// JSON documents for coins and states.
//
//   coin:  {"d": 2, "matrix": [[[re, im], ...], ...]}            (row-major)
//   state: {"d": 2, "entries": [{"x": [0, 1], "amp": [[re, im], ...]}, ...]}
//
// Doubles are written in shortest round-trip form, so write -> read is exact.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qwalk/core.hpp"

namespace qwalk {

using Json = nlohmann::json;

Json complex_to_json(Complex z);
Json coin_to_json(const CoinMatrix& c);
Json state_to_json(const LatticeState& psi);

/// Throws ParseError naming the offending field, ShapeError or ValidationError.
CoinMatrix coin_from_json(const Json& doc);
LatticeState state_from_json(const Json& doc);

CoinMatrix load_coin(std::string_view document);
LatticeState load_state(std::string_view document);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace qwalk
