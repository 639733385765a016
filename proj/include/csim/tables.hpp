// Published comparison tables for the three schemes: bits per symbol
// duration, energy-saving percentages at a common per-row total rate, and
// detector multiplication counts.

#pragma once

#include <string>
#include <vector>

#include "csim/analysis.hpp"

namespace csim::tables {

struct RateRow {
    int nt, nc, m;
    double sm_cim, stbc_sm_cim, estbc_sm_cim; // bits per symbol duration
};

struct EnergyRow {
    int nt, nc, m;
    double common_bt; // all schemes compared at this per-interval total rate
    double sm_cim, stbc_sm_cim, estbc_sm_cim; // percent saved
};

struct ComplexityRow {
    std::string scheme;
    std::string detector;
    std::string formula;
    long long count;
};

// per-interval bit budget laws
double bits_sm_cim(int nt, int nc, int m);
double bits_stbc_sm_cim(int nt, int nc, int m);
double bits_estbc_sm_cim(int nt, int nc, int m);

std::vector<RateRow> rate_table();
std::vector<EnergyRow> energy_table();
std::vector<ComplexityRow> complexity_table(const analysis::ComplexityParams& base);

std::string render_rate_table(const std::vector<RateRow>& rows);
std::string render_energy_table(const std::vector<EnergyRow>& rows);
std::string render_complexity_table(const std::vector<ComplexityRow>& rows);

std::string rate_table_csv(const std::vector<RateRow>& rows);
std::string energy_table_csv(const std::vector<EnergyRow>& rows);
std::string complexity_table_csv(const std::vector<ComplexityRow>& rows);

} // namespace csim::tables
