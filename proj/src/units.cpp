#include "nlgrav/units.hpp"

#include <cmath>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"

namespace nlgrav {

std::string_view to_string(GravityModel model) {
    switch (model) {
        case GravityModel::newtonian: return "newtonian";
        case GravityModel::idg: return "idg";
        case GravityModel::yukawa: return "yukawa";
    }
    return "unknown";
}

GravityModel parse_model(std::string_view name) {
    if (name == "newtonian") return GravityModel::newtonian;
    if (name == "idg") return GravityModel::idg;
    if (name == "yukawa") return GravityModel::yukawa;
    throw DomainError("unknown gravity model '" + std::string(name) +
                      "' (expected newtonian, idg or yukawa)");
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void PhysicalParams::validate() const {
    if (!positive_finite(mass_kg)) {
        throw DomainError("mass must be positive and finite, got " + std::to_string(mass_kg));
    }
    if (model == GravityModel::idg && !(ms_ev && positive_finite(*ms_ev))) {
        throw DomainError("idg model requires a positive non-locality scale M_s");
    }
    if (ms_ev && !positive_finite(*ms_ev)) {
        throw DomainError("M_s must be positive and finite");
    }
    if (model == GravityModel::yukawa && !(yukawa_mu_inv_m && positive_finite(*yukawa_mu_inv_m))) {
        throw DomainError("yukawa model requires a positive range parameter mu");
    }
}

PhysicalParams PhysicalParams::newtonian(double mass_kg) {
    return {mass_kg, std::nullopt, GravityModel::newtonian, std::nullopt};
}

PhysicalParams PhysicalParams::idg(double mass_kg, double ms_ev) {
    return {mass_kg, ms_ev, GravityModel::idg, std::nullopt};
}

PhysicalParams PhysicalParams::yukawa(double mass_kg, double mu_inv_m) {
    return {mass_kg, std::nullopt, GravityModel::yukawa, mu_inv_m};
}

double NaturalScales::nonlocality_length_m() const {
    if (beta <= 0.0) throw DomainError("no non-locality scale configured");
    return length_unit_m / beta;
}

NaturalScales natural_scales(const PhysicalParams& p, std::optional<double> length_unit_m) {
    p.validate();
    using namespace constants;
    NaturalScales s;
    const double m = p.mass_kg;
    // Evaluated as (hbar/m)^2 / (G m) to stay inside double range for tiny masses.
    s.l0_m = (hbar_si / m) * (hbar_si / m) / (g_si * m);
    if (length_unit_m && !positive_finite(*length_unit_m)) {
        throw DomainError("length unit must be positive and finite");
    }
    s.length_unit_m = length_unit_m.value_or(s.l0_m);
    s.coupling = s.length_unit_m / s.l0_m;
    s.hbar_c_ev_m = hbar_c_ev_m;
    s.g_si = g_si;
    if (p.ms_ev) s.beta = (*p.ms_ev / hbar_c_ev_m) * s.length_unit_m;
    if (p.model == GravityModel::yukawa) s.mu = *p.yukawa_mu_inv_m * s.length_unit_m;
    s.energy_unit_j = (hbar_si / s.length_unit_m) * (hbar_si / s.length_unit_m) / m;
    s.time_unit_s = hbar_si / s.energy_unit_j;
    return s;
}

double length_to_si(double x_natural, const NaturalScales& s) { return x_natural * s.length_unit_m; }
double length_to_natural(double meters, const NaturalScales& s) { return meters / s.length_unit_m; }
double energy_to_si(double e_natural, const NaturalScales& s) { return e_natural * s.energy_unit_j; }
double energy_to_natural(double joules, const NaturalScales& s) { return joules / s.energy_unit_j; }
double time_to_si(double t_natural, const NaturalScales& s) { return t_natural * s.time_unit_s; }
double time_to_natural(double seconds, const NaturalScales& s) { return seconds / s.time_unit_s; }

}  // namespace nlgrav
