#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace nlgrav {

enum class GravityModel { newtonian, idg, yukawa };

std::string_view to_string(GravityModel model);
GravityModel parse_model(std::string_view name);

/// SI-facing description of a single self-gravitating system.
struct PhysicalParams {
    double mass_kg = 0.0;
    std::optional<double> ms_ev;            // non-locality scale M_s (idg)
    GravityModel model = GravityModel::newtonian;
    std::optional<double> yukawa_mu_inv_m;  // Yukawa range mu (yukawa)

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    static PhysicalParams newtonian(double mass_kg);
    static PhysicalParams idg(double mass_kg, double ms_ev);
    static PhysicalParams yukawa(double mass_kg, double mu_inv_m);
};

/// Nondimensionalization bundle. All internal lengths are measured in
/// length_unit_m, energies in hbar^2/(m L^2) and times in m L^2/hbar. With the
/// default unit L = l0 the gravitational coupling is exactly one.
struct NaturalScales {
    double l0_m = 0.0;           // hbar^2 / (G m^3)
    double length_unit_m = 0.0;  // L
    double coupling = 1.0;       // G m^3 L / hbar^2 = L / l0
    double beta = 0.0;           // M_s L / (hbar c); zero when no M_s given
    double mu = 0.0;             // Yukawa mu * L; zero unless yukawa
    double hbar_c_ev_m = 0.0;
    double g_si = 0.0;
    double energy_unit_j = 0.0;
    double time_unit_s = 0.0;

    /// hbar c / M_s in meters; throws DomainError when beta == 0.
    double nonlocality_length_m() const;
};

NaturalScales natural_scales(const PhysicalParams& p,
                             std::optional<double> length_unit_m = std::nullopt);

double length_to_si(double x_natural, const NaturalScales& s);
double length_to_natural(double meters, const NaturalScales& s);
double energy_to_si(double e_natural, const NaturalScales& s);
double energy_to_natural(double joules, const NaturalScales& s);
double time_to_si(double t_natural, const NaturalScales& s);
double time_to_natural(double seconds, const NaturalScales& s);

}  // namespace nlgrav
