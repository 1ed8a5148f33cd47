#include "nlgrav/tables.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/generated.hpp"
#include "nlgrav/io.hpp"
#include "nlgrav/kernels.hpp"

namespace nlgrav {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw DomainError(std::string("cannot parse ") + what + " '" + text + "'");
    }
}

std::string column_label(GravityModel model, const std::optional<double>& ms_ev) {
    if (model == GravityModel::newtonian || !ms_ev) return std::string(to_string(model));
    return "Ms=" + io::format_double(*ms_ev) + "eV";
}

PhysicalParams params_for(const ReferenceCell& c) {
    if (c.model == GravityModel::newtonian) return PhysicalParams::newtonian(c.mass_kg);
    if (c.model == GravityModel::idg && c.ms_ev) return PhysicalParams::idg(c.mass_kg, *c.ms_ev);
    throw DomainError("reference cells must be newtonian or idg with a scale");
}

}  // namespace

std::vector<ReferenceCell> parse_reference_csv(std::istream& is) {
    std::vector<ReferenceCell> cells;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "mass_kg,model,ms_ev,sigma_m") {
                throw DomainError("unexpected reference header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 4) throw DomainError("reference line " + std::to_string(line_no) + " needs 4 fields");
        ReferenceCell c;
        c.mass_kg = parse_number(f[0], "mass_kg");
        c.model = parse_model(f[1]);
        if (!f[2].empty()) c.ms_ev = parse_number(f[2], "ms_ev");
        c.sigma_m = parse_number(f[3], "sigma_m");
        cells.push_back(c);
    }
    if (!header_seen) throw DomainError("reference table has no header");
    return cells;
}

const std::vector<ReferenceCell>& table1_reference() {
    static const std::vector<ReferenceCell> cells = [] {
        std::istringstream is{std::string(generated::table1_reference_csv)};
        return parse_reference_csv(is);
    }();
    return cells;
}

Table1Result compute_table1(unsigned threads) {
    const auto start = std::chrono::steady_clock::now();
    const auto& ref = table1_reference();
    std::vector<PhysicalParams> params;
    params.reserve(ref.size());
    for (const auto& c : ref) params.push_back(params_for(c));
    const auto rows = sweep(params, {}, threads);

    Table1Result t;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        Table1Cell cell;
        cell.reference = ref[i];
        cell.computed = rows[i].result;
        cell.error = rows[i].error;
        if (cell.computed) {
            cell.relative_deviation = cell.computed->sigma_m / ref[i].sigma_m - 1.0;
            cell.pass = std::abs(cell.relative_deviation) <= kTable1Tolerance;
            t.max_relative_deviation = std::max(t.max_relative_deviation, std::abs(cell.relative_deviation));
        }
        if (!cell.pass) ++t.failures;
        t.cells.push_back(std::move(cell));
    }
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return t;
}

void write_table1_csv(std::ostream& os, const Table1Result& t) {
    io::write_csv_preamble(os, io::kTable1Schema,
                           {{"tolerance", kTable1Tolerance}, {"constants", constants::source}});
    os << "mass_kg,column,ms_ev,sigma_m,reference_sigma_m,relative_deviation,regime,beta_sigma,status\n";
    for (const auto& c : t.cells) {
        const auto& r = c.reference;
        os << io::format_double(r.mass_kg) << ',' << column_label(r.model, r.ms_ev) << ','
           << (r.ms_ev ? io::format_double(*r.ms_ev) : "") << ',';
        if (c.computed) {
            os << io::format_double(c.computed->sigma_m) << ',' << io::format_double(r.sigma_m) << ','
               << io::format_double(c.relative_deviation) << ',' << to_string(c.computed->regime) << ','
               << io::format_double(c.computed->scale_product) << ',' << (c.pass ? "pass" : "fail");
        } else {
            os << ',' << io::format_double(r.sigma_m) << ",,,,error";
        }
        os << '\n';
    }
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log grid needs 0 < lo <= hi");
    if (n == 0) throw DomainError("log grid needs at least one point");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<Fig1Curve> compute_fig1(const Fig1Options& opt) {
    if (!(opt.mass_min_kg > 0.0) || !(opt.mass_max_kg > opt.mass_min_kg)) {
        throw DomainError("mass range must satisfy 0 < mass_min < mass_max");
    }
    if (opt.points < 2) throw DomainError("fig1 needs at least two mass points");
    if (opt.ms_ev.empty() && !opt.include_newtonian) throw DomainError("fig1 has no curves to compute");
    const auto masses = log_spaced(opt.mass_min_kg, opt.mass_max_kg, opt.points);

    std::vector<Fig1Curve> curves;
    std::vector<PhysicalParams> all;
    if (opt.include_newtonian) {
        curves.push_back({GravityModel::newtonian, std::nullopt, {}});
        for (double m : masses) all.push_back(PhysicalParams::newtonian(m));
    }
    for (double ms : opt.ms_ev) {
        curves.push_back({GravityModel::idg, ms, {}});
        for (double m : masses) all.push_back(PhysicalParams::idg(m, ms));
    }
    auto rows = sweep(all, {}, opt.threads);
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto first = rows.begin() + static_cast<std::ptrdiff_t>(c * masses.size());
        curves[c].rows.assign(first, first + static_cast<std::ptrdiff_t>(masses.size()));
        for (std::size_t i = 0; i < masses.size(); ++i) curves[c].rows[i].index = i;
    }
    return curves;
}

void write_fig1_csv(std::ostream& os, const std::vector<Fig1Curve>& curves) {
    io::write_csv_preamble(os, io::kFig1Schema, {{"constants", constants::source}});
    os << "m_kg,model,Ms_eV,sigma_m,regime,status\n";
    for (const auto& c : curves) {
        for (const auto& row : c.rows) {
            os << io::format_double(row.params.mass_kg) << ',' << to_string(c.model) << ','
               << (c.ms_ev ? io::format_double(*c.ms_ev) : "") << ',';
            if (row.result) {
                os << io::format_double(row.result->sigma_m) << ',' << to_string(row.result->regime) << ",ok";
            } else {
                os << ",,error";
            }
            os << '\n';
        }
    }
}

Fig1Properties check_fig1(const std::vector<Fig1Curve>& curves, double merge_threshold,
                          double merge_tolerance) {
    Fig1Properties p;
    const Fig1Curve* newton = nullptr;
    std::vector<const Fig1Curve*> idg;
    for (const auto& c : curves) {
        if (c.model == GravityModel::newtonian) newton = &c;
        if (c.model == GravityModel::idg) idg.push_back(&c);
        for (const auto& row : c.rows) {
            if (!row.result) ++p.failed_points;
        }
        for (std::size_t i = 1; i < c.rows.size(); ++i) {
            const auto& a = c.rows[i - 1].result;
            const auto& b = c.rows[i].result;
            if (a && b && !(b->sigma_m < a->sigma_m)) ++p.monotonicity_violations;
        }
    }
    std::sort(idg.begin(), idg.end(), [](const Fig1Curve* a, const Fig1Curve* b) { return *a->ms_ev < *b->ms_ev; });

    constexpr double tie = 1e-12;
    for (std::size_t k = 1; k < idg.size(); ++k) {
        const auto& lo = idg[k - 1]->rows;
        const auto& hi = idg[k]->rows;
        for (std::size_t i = 0; i < std::min(lo.size(), hi.size()); ++i) {
            if (lo[i].result && hi[i].result && hi[i].result->sigma_m > lo[i].result->sigma_m * (1.0 + tie)) {
                ++p.ordering_violations;
            }
        }
    }
    if (!newton) return p;
    for (const auto* c : idg) {
        const double lambda = constants::hbar_c_ev_m / *c->ms_ev;
        for (std::size_t i = 0; i < std::min(c->rows.size(), newton->rows.size()); ++i) {
            const auto& r = c->rows[i].result;
            const auto& n = newton->rows[i].result;
            if (!r || !n) continue;
            if (r->sigma_m < n->sigma_m * (1.0 - tie)) ++p.ordering_violations;
            if (r->sigma_m / lambda > merge_threshold) {
                const double dev = std::abs(r->sigma_m / n->sigma_m - 1.0);
                p.merge_max_deviation = std::max(p.merge_max_deviation, dev);
                if (dev > merge_tolerance) ++p.merge_violations;
            }
        }
    }
    return p;
}

KernelCheck kernel_check(double beta, std::size_t points) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("kernel check needs beta > 0");
    if (points < 2) throw DomainError("kernel check needs at least two radii");
    KernelCheck kc;
    kc.beta = beta;
    const auto k = GravityKernel::idg(beta);
    for (double r : log_spaced(1e-3 / beta, 1e2 / beta, points)) {
        FormFactorDiagnostics d;
        KernelCheckRow row;
        row.r = r;
        row.closed_form = k(r);
        row.spectral = kernel_from_form_factor(beta, r, &d);
        row.panels = d.panels;
        row.relative_deviation = std::abs(row.spectral / row.closed_form - 1.0);
        kc.max_relative_deviation = std::max(kc.max_relative_deviation, row.relative_deviation);
        kc.rows.push_back(row);
    }
    return kc;
}

void write_kernel_check_csv(std::ostream& os, const KernelCheck& kc) {
    io::write_csv_preamble(os, io::kKernelCheckSchema, {{"beta", kc.beta}});
    os << "r,closed_form,spectral,relative_deviation,panels\n";
    for (const auto& r : kc.rows) {
        os << io::format_double(r.r) << ',' << io::format_double(r.closed_form) << ','
           << io::format_double(r.spectral) << ',' << io::format_double(r.relative_deviation) << ','
           << r.panels << '\n';
    }
}

}  // namespace nlgrav
