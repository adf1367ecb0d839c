#pragma once

#include "csx/model.hpp"
#include "csx/sema.hpp"

#include <map>
#include <string>
#include <string_view>

namespace csx {

/// Action location parameter -> device location it is instantiated with.
using Renaming = std::map<std::string, std::string>;

/// Reserved name of the synthetic instance used by inhabitance lowering.
inline constexpr std::string_view kInhab = "inhab";

ConstraintModel lower_device(const TypedSpec& tspec, std::string_view device);

/// Lowers an analyzed expression in namespace `ns` under renaming `r`.
/// Location references always resolve to top-level names.
FlatExpr lower_expr(const TypedSpec& tspec, const Expr& e, const Namespace& ns,
                    const Renaming& r);

/// Lowers an expression analyzed in device scope (job constraints,
/// objectives, scenario expressions).
FlatExpr lower_device_expr(const TypedSpec& tspec, const Expr& e);

/// One instance of `type` at location `inhab`.
ConstraintModel lower_type_inhabitance(const TypedSpec& tspec, std::string_view type);

/// Each location parameter under its own name, parameters under `inhab`,
/// action constraints under the identity renaming.
ConstraintModel lower_action_inhabitance(const TypedSpec& tspec, std::string_view action);

/// The renaming a component instantiates its action with.
Renaming component_renaming(const TypedSpec& tspec, const ComponentDef& comp);

} // namespace csx
