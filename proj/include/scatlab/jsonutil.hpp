#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace scatlab {

/** Canonical serialization: object keys sorted, floats printed with 17
    significant digits, no whitespace. Feeds cache keys and config hashes. */
std::string canonical_dump(const nlohmann::json& j);

} // namespace scatlab
