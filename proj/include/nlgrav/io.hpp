#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nlgrav/evolution.hpp"
#include "nlgrav/groundstate.hpp"
#include "nlgrav/variational.hpp"

namespace nlgrav::io {

using json = nlohmann::json;

/// Fixed 17-significant-digit rendering used in every CSV.
std::string format_double(double x);

/// Pinned physical constants as emitted in manifests.
json constants_json();

/// Manifest for one CLI run: command, resolved parameters, constants,
/// artifact version and an ISO-8601 UTC timestamp.
json make_manifest(std::string_view command, const json& params);

/// First CSV line: "# " followed by compact JSON with at least a "schema" key.
void write_csv_preamble(std::ostream& os, std::string_view schema, const json& extra = json::object());

json to_json(const SpreadResult& r);
json to_json(const SolverReport& r, bool include_histories = false);
json to_json(const PhysicalParams& p);

/// Profile CSV: preamble with the grid, then columns r,R,Phi.
void write_profile_csv(std::ostream& os, const RadialState& s, std::span<const double> phi,
                       const json& extra = json::object());
RadialState read_profile_csv(std::istream& is);

/// Trajectory CSV: columns t,width,norm,F.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const json& extra = json::object());

inline constexpr std::string_view kProfileSchema = "nlgrav.profile/1";
inline constexpr std::string_view kTrajectorySchema = "nlgrav.trajectory/1";
inline constexpr std::string_view kTable1Schema = "nlgrav.table1/1";
inline constexpr std::string_view kFig1Schema = "nlgrav.fig1/1";
inline constexpr std::string_view kKernelCheckSchema = "nlgrav.kernel_check/1";

}  // namespace nlgrav::io
