#pragma once

#include <json.hpp>

#include "rsl/model.hpp"

namespace rsl::detail {

/// Generic read-only view of an element keyed by pattern attribute names
/// (`id`, `kind`, `attributes`, `scenarios.steps`, ...). Absent optionals are
/// null, as is an Unset priority; vocabulary values are their literals; the element kind name is
/// available under `element_kind`.
nlohmann::ordered_json element_view(const Element& e);

}  // namespace rsl::detail
