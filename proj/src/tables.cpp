#include "csim/tables.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace csim::tables {

namespace {

double log2d(double v) { return std::log2(v); }

int pow2_floor_log2(long long v) {
    int n = 1;
    while (2LL * n <= v) n *= 2;
    return n;
}

int nz_of(int nt) { return pow2_floor_log2(static_cast<long long>(nt) * (nt - 1) / 2); }
int ns_of(int nc) { return pow2_floor_log2(static_cast<long long>(nc) * (nc - 1) / 2); }

// reference configurations used across the published comparisons; the energy
// comparison fixes a common total rate per row and adapts the constellation,
// leaving the index bits to the row's (Nt, Nc)
struct RowDef {
    int nt, nc, m;
    double common_bt;
};
constexpr RowDef kRows[3] = {{4, 4, 4, 7.0}, {4, 8, 4, 9.0}, {8, 16, 8, 14.0}};

} // namespace

double bits_sm_cim(int nt, int nc, int m) { return log2d(nt) + log2d(m) + log2d(nc); }

double bits_stbc_sm_cim(int nt, int nc, int m) {
    return 0.5 * log2d(nz_of(nt)) + log2d(m) + 0.5 * log2d(nc);
}

double bits_estbc_sm_cim(int nt, int nc, int m) {
    return 0.5 * log2d(nz_of(nt)) + 2.0 * log2d(m) + 0.5 * log2d(ns_of(nc));
}

std::vector<RateRow> rate_table() {
    std::vector<RateRow> out;
    for (const auto& r : kRows) {
        RateRow row{r.nt, r.nc, r.m, 0, 0, 0};
        row.sm_cim = analysis::data_rate(bits_sm_cim(r.nt, r.nc, r.m), 0.0, 1.0);
        row.stbc_sm_cim = analysis::data_rate(bits_stbc_sm_cim(r.nt, r.nc, r.m), 0.0, 1.0);
        row.estbc_sm_cim = analysis::data_rate(bits_estbc_sm_cim(r.nt, r.nc, r.m), 0.0, 1.0);
        out.push_back(row);
    }
    return out;
}

std::vector<EnergyRow> energy_table() {
    std::vector<EnergyRow> out;
    for (const auto& r : kRows) {
        EnergyRow row{r.nt, r.nc, r.m, r.common_bt, 0, 0, 0};
        // index bits ride for free; the remaining b2 = bt - (b1+b3) are modulated
        const double idx_sm = log2d(r.nt) + log2d(r.nc);
        const double idx_stbc = 0.5 * log2d(nz_of(r.nt)) + 0.5 * log2d(r.nc);
        const double idx_estbc = 0.5 * log2d(nz_of(r.nt)) + 0.5 * log2d(ns_of(r.nc));
        row.sm_cim = analysis::energy_saving(r.common_bt - idx_sm, r.common_bt);
        row.stbc_sm_cim = analysis::energy_saving(r.common_bt - idx_stbc, r.common_bt);
        row.estbc_sm_cim = analysis::energy_saving(r.common_bt - idx_estbc, r.common_bt);
        out.push_back(row);
    }
    return out;
}

std::vector<ComplexityRow> complexity_table(const analysis::ComplexityParams& base) {
    std::vector<ComplexityRow> out;
    const modem::Scheme schemes[3] = {modem::Scheme::sm_cim, modem::Scheme::stbc_sm_cim,
                                      modem::Scheme::estbc_sm_cim};
    for (const modem::Scheme s : schemes) {
        analysis::ComplexityParams p = base;
        p.Nz = nz_of(static_cast<int>(base.Nt));
        switch (s) {
            case modem::Scheme::sm_cim:
                p.bt = bits_sm_cim(static_cast<int>(base.Nt), static_cast<int>(base.Nc),
                                   static_cast<int>(base.M));
                break;
            case modem::Scheme::stbc_sm_cim:
                p.bt = bits_stbc_sm_cim(static_cast<int>(base.Nt), static_cast<int>(base.Nc),
                                        static_cast<int>(base.M));
                break;
            case modem::Scheme::estbc_sm_cim:
                p.bt = bits_estbc_sm_cim(static_cast<int>(base.Nt), static_cast<int>(base.Nc),
                                         static_cast<int>(base.M));
                break;
        }
        for (const modem::Detector d : {modem::Detector::ml, modem::Detector::lc}) {
            ComplexityRow row;
            row.scheme = modem::scheme_name(s);
            row.detector = d == modem::Detector::ml ? "ml" : "lc";
            row.formula = analysis::complexity_formula(s, d);
            row.count = analysis::complexity_count(s, d, p);
            out.push_back(row);
        }
    }
    return out;
}

namespace {

std::string fmt_bt(double v) {
    char buf[32];
    if (v == std::floor(v))
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string fmt_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", v);
    return buf;
}

} // namespace

std::string render_rate_table(const std::vector<RateRow>& rows) {
    std::ostringstream os;
    os << "Data rate (bits per Ts)\n";
    os << "Nt  Nc  M   sm_cim  stbc_sm_cim  estbc_sm_cim\n";
    for (const RateRow& r : rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%-3d %-3d %-3d %-7s %-12s %s\n", r.nt, r.nc, r.m,
                      fmt_bt(r.sm_cim).c_str(), fmt_bt(r.stbc_sm_cim).c_str(),
                      fmt_bt(r.estbc_sm_cim).c_str());
        os << line;
    }
    return os.str();
}

std::string render_energy_table(const std::vector<EnergyRow>& rows) {
    std::ostringstream os;
    os << "Energy saving at a common total rate bt\n";
    os << "Nt  Nc  M   bt   sm_cim   stbc_sm_cim  estbc_sm_cim\n";
    for (const EnergyRow& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-3d %-3d %-3d %-4s %-8s %-12s %s\n", r.nt, r.nc, r.m,
                      fmt_bt(r.common_bt).c_str(), fmt_pct(r.sm_cim).c_str(),
                      fmt_pct(r.stbc_sm_cim).c_str(), fmt_pct(r.estbc_sm_cim).c_str());
        os << line;
    }
    return os.str();
}

std::string render_complexity_table(const std::vector<ComplexityRow>& rows) {
    std::ostringstream os;
    os << "Real multiplications per symbol duration\n";
    os << "scheme        det  count      formula\n";
    for (const ComplexityRow& r : rows) {
        char line[192];
        std::snprintf(line, sizeof line, "%-13s %-4s %-10lld %s\n", r.scheme.c_str(),
                      r.detector.c_str(), r.count, r.formula.c_str());
        os << line;
    }
    return os.str();
}

std::string rate_table_csv(const std::vector<RateRow>& rows) {
    std::ostringstream os;
    os << "Nt,Nc,M,sm_cim,stbc_sm_cim,estbc_sm_cim\n";
    for (const RateRow& r : rows)
        os << r.nt << ',' << r.nc << ',' << r.m << ',' << r.sm_cim << ',' << r.stbc_sm_cim << ','
           << r.estbc_sm_cim << '\n';
    return os.str();
}

std::string energy_table_csv(const std::vector<EnergyRow>& rows) {
    std::ostringstream os;
    os << "Nt,Nc,M,common_bt,sm_cim,stbc_sm_cim,estbc_sm_cim\n";
    for (const EnergyRow& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%d,%d,%d,%g,%.4f,%.4f,%.4f\n", r.nt, r.nc, r.m,
                      r.common_bt, r.sm_cim, r.stbc_sm_cim, r.estbc_sm_cim);
        os << line;
    }
    return os.str();
}

std::string complexity_table_csv(const std::vector<ComplexityRow>& rows) {
    std::ostringstream os;
    os << "scheme,detector,count,formula\n";
    for (const ComplexityRow& r : rows)
        os << r.scheme << ',' << r.detector << ',' << r.count << ',' << r.formula << '\n';
    return os.str();
}

} // namespace csim::tables
