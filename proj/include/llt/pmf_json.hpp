#pragma once

#include <json.hpp>

#include "llt/lattice_pmf.hpp"

namespace llt {

/// {"offset": int, "masses": [...], "mode": "exact"|"float"}; exact masses are "p/q" strings.
nlohmann::json pmf_to_json(const AnyPmf& p);
AnyPmf pmf_from_json(const nlohmann::json& j);

}  // namespace llt
