#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlgrav/variational.hpp"

namespace nlgrav {

/// One tabulated spread: a mass and either the Newtonian column or an M_s column.
struct ReferenceCell {
    double mass_kg = 0.0;
    GravityModel model = GravityModel::newtonian;
    std::optional<double> ms_ev;
    double sigma_m = 0.0;
};

/// The reference spreads compiled into the library from data/table1_reference.csv.
const std::vector<ReferenceCell>& table1_reference();
std::vector<ReferenceCell> parse_reference_csv(std::istream& is);

struct Table1Cell {
    ReferenceCell reference;
    std::optional<SpreadResult> computed;
    double relative_deviation = 0.0;
    bool pass = false;
    std::string error;
};

struct Table1Result {
    std::vector<Table1Cell> cells;
    double max_relative_deviation = 0.0;
    std::size_t failures = 0;
    double seconds = 0.0;
};

inline constexpr double kTable1Tolerance = 0.05;

Table1Result compute_table1(unsigned threads = 1);
void write_table1_csv(std::ostream& os, const Table1Result& t);

struct Fig1Options {
    double mass_min_kg = 1e-18;
    double mass_max_kg = 1e-8;
    std::size_t points = 101;
    std::vector<double> ms_ev{0.004, 0.01, 0.1};
    bool include_newtonian = true;
    unsigned threads = 1;
};

struct Fig1Curve {
    GravityModel model = GravityModel::newtonian;
    std::optional<double> ms_ev;
    std::vector<SweepRow> rows;
};

std::vector<double> log_spaced(double lo, double hi, std::size_t n);
std::vector<Fig1Curve> compute_fig1(const Fig1Options& opt);
void write_fig1_csv(std::ostream& os, const std::vector<Fig1Curve>& curves);

/// Qualitative checks on a set of spread curves sharing one mass grid.
struct Fig1Properties {
    std::size_t monotonicity_violations = 0;  // sigma not decreasing with mass
    std::size_t ordering_violations = 0;      // larger M_s not giving the smaller sigma
    std::size_t merge_violations = 0;         // sigma > 2/M_s but far from Newtonian
    std::size_t failed_points = 0;
    double merge_max_deviation = 0.0;
};

/// `merge_tolerance` bounds |sigma/sigma_N - 1| where M_s sigma exceeds
/// `merge_threshold` (in units of hbar c).
Fig1Properties check_fig1(const std::vector<Fig1Curve>& curves, double merge_threshold = 20.0,
                          double merge_tolerance = 0.05);

struct KernelCheckRow {
    double r = 0.0;
    double closed_form = 0.0;
    double spectral = 0.0;
    double relative_deviation = 0.0;
    std::size_t panels = 0;
};

struct KernelCheck {
    double beta = 1.0;
    std::vector<KernelCheckRow> rows;
    double max_relative_deviation = 0.0;
};

/// Closed-form IDG kernel against its momentum-space inversion on `points`
/// log-spaced radii in [1e-3/beta, 1e2/beta].
KernelCheck kernel_check(double beta = 1.0, std::size_t points = 50);
void write_kernel_check_csv(std::ostream& os, const KernelCheck& kc);

}  // namespace nlgrav
