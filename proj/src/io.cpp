#include "nlgrav/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/generated.hpp"

namespace nlgrav::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json constants_json() {
    using namespace constants;
    return {
        {"source", source},
        {"hbar_J_s", hbar_si},
        {"G_m3_kg_s2", g_si},
        {"c_m_s", c_si},
        {"J_per_eV", joule_per_ev},
        {"hbar_c_eV_m", hbar_c_ev_m},
    };
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

json make_manifest(std::string_view command, const json& params) {
    return {
        {"command", command},
        {"params", params},
        {"constants", constants_json()},
        {"versions", {{"nlgrav", generated::version}}},
        {"timestamp", utc_timestamp()},
    };
}

void write_csv_preamble(std::ostream& os, std::string_view schema, const json& extra) {
    json head = extra.is_object() ? extra : json::object();
    head["schema"] = schema;
    os << "# " << head.dump() << '\n';
}

json to_json(const PhysicalParams& p) {
    json j = {{"mass_kg", p.mass_kg}, {"model", to_string(p.model)}};
    j["ms_ev"] = p.ms_ev ? json(*p.ms_ev) : json(nullptr);
    j["yukawa_mu_inv_m"] = p.yukawa_mu_inv_m ? json(*p.yukawa_mu_inv_m) : json(nullptr);
    return j;
}

json to_json(const SpreadResult& r) {
    return {
        {"model", to_string(r.model)},
        {"mass_kg", r.mass_kg},
        {"ms_ev", r.ms_ev ? json(*r.ms_ev) : json(nullptr)},
        {"sigma_m", r.sigma_m},
        {"sigma_natural", r.sigma_natural},
        {"energy_natural", r.energy_natural},
        {"scale_product", r.scale_product},
        {"regime", to_string(r.regime)},
        {"residual", r.residual},
        {"iterations", r.iterations},
        {"bracket_m", {r.bracket_m[0], r.bracket_m[1]}},
    };
}

json to_json(const SolverReport& r, bool include_histories) {
    json j = {
        {"converged", r.converged},
        {"domain_adequate", r.domain_adequate},
        {"weakly_bound", r.weakly_bound},
        {"residual", r.residual},
        {"energy_functional", r.energy_functional},
        {"energy_expectation", r.energy_expectation},
        {"kinetic", r.kinetic},
        {"interaction", r.interaction},
        {"chemical_potential", r.chemical_potential},
        {"virial_ratio", r.virial_ratio},
        {"width", r.width},
        {"initial_width", r.initial_width},
        {"tail_ratio", r.tail_ratio},
        {"iterations", r.iterations},
        {"rejected_steps", r.rejected_steps},
        {"expansions", r.expansions},
    };
    if (include_histories) {
        j["residual_history"] = r.residual_history;
        j["functional_history"] = r.functional_history;
    }
    return j;
}

void write_profile_csv(std::ostream& os, const RadialState& s, std::span<const double> phi,
                       const json& extra) {
    if (phi.size() != s.u.size()) throw DomainError("potential size does not match state");
    json head = extra;
    head["spacing"] = s.grid.spacing;
    head["nodes"] = s.grid.nodes;
    head["chemical_potential"] = s.chemical_potential;
    write_csv_preamble(os, kProfileSchema, head);
    os << "r,R,Phi\n";
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        os << format_double(s.grid.r(i)) << ',' << format_double(s.R(i)) << ','
           << format_double(phi[i]) << '\n';
    }
}

RadialState read_profile_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
        throw DomainError("profile CSV must start with a '# {json}' preamble");
    }
    json head;
    try {
        head = json::parse(line.substr(2));
    } catch (const json::exception& e) {
        throw DomainError(std::string("bad profile preamble: ") + e.what());
    }
    if (head.value("schema", "") != kProfileSchema) {
        throw DomainError("unsupported profile schema '" + head.value("schema", "") + "'");
    }
    RadialState s;
    s.grid.spacing = head.at("spacing").get<double>();
    s.grid.nodes = head.at("nodes").get<std::size_t>();
    s.chemical_potential = head.value("chemical_potential", 0.0);
    s.grid.validate();
    if (!std::getline(is, line) || line != "r,R,Phi") throw DomainError("missing profile column header");
    s.u.reserve(s.grid.nodes);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string r_text, big_r_text;
        std::getline(row, r_text, ',');
        std::getline(row, big_r_text, ',');
        const double r = std::stod(r_text);
        const std::size_t i = s.u.size();
        if (i >= s.grid.nodes || std::abs(r - s.grid.r(i)) > 1e-9 * s.grid.r(i)) {
            throw DomainError("profile rows do not match the declared grid at row " + std::to_string(i));
        }
        s.u.push_back(r * std::stod(big_r_text));
    }
    if (s.u.size() != s.grid.nodes) throw DomainError("profile has fewer rows than declared nodes");
    s.norm = state_norm(s.grid, s.u);
    return s;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const json& extra) {
    write_csv_preamble(os, kTrajectorySchema, extra);
    os << "t,width,norm,F\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        os << format_double(tr.times[i]) << ',' << format_double(tr.widths[i]) << ','
           << format_double(tr.norms[i]) << ',' << format_double(tr.energies_F[i]) << '\n';
    }
}

}  // namespace nlgrav::io
