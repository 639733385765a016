#include "csim/results.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace csim::results {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string format_row(const Row& row) {
    std::ostringstream os;
    char digest[24];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(row.spec_digest));
    os << row.experiment << ',' << row.scheme << ',' << row.detector << ',' << row.nt << ','
       << row.nr << ',' << row.nc << ',' << row.m << ',' << fmt_double(row.snr_db) << ','
       << fmt_double(row.ber) << ',' << fmt_sci(row.ber) << ',' << fmt_double(row.ci95) << ','
       << row.bits_simulated << ',' << row.source << ',' << row.seed << ',' << digest;
    return os.str();
}

std::vector<Row> rows_from_curve(const std::string& experiment, const sim::ExperimentSpec& spec,
                                 const sim::BerCurve& curve) {
    std::vector<Row> rows;
    const char* det = curve.detector == modem::Detector::ml ? "ml" : "lc";
    for (const sim::BerPoint& p : curve.points) {
        Row r;
        r.experiment = experiment;
        r.scheme = modem::scheme_name(spec.scheme.scheme);
        r.detector = det;
        r.nt = spec.scheme.num_tx_Nt;
        r.nr = spec.scheme.num_rx_Nr;
        r.nc = spec.scheme.num_codes_Nc;
        r.m = spec.scheme.modulation_order_M;
        r.snr_db = p.snr_db;
        r.ber = p.ber;
        r.ci95 = p.ci95_halfwidth;
        r.bits_simulated = p.bits_simulated;
        r.source = "sim";
        r.seed = spec.master_seed;
        r.spec_digest = curve.spec_digest;
        rows.push_back(std::move(r));
    }
    if (curve.has_analytic) {
        for (size_t i = 0; i < curve.points.size(); ++i) {
            Row r = rows[i];
            r.ber = curve.analytic_pb[i];
            r.ci95 = 0.0;
            r.bits_simulated = 0;
            r.source = "analytic";
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::string render_csv(const std::vector<Row>& rows) {
    std::ostringstream os;
    os << kSchemaLine << '\n' << kHeaderLine << '\n';
    for (const Row& r : rows) os << format_row(r) << '\n';
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << body;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

std::vector<Row> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file " + path);
    std::string line;
    std::vector<Row> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kHeaderLine)
                throw std::runtime_error("unexpected results header in " + path);
            header_seen = true;
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 15) throw std::runtime_error("malformed results row in " + path);
        Row r;
        r.experiment = f[0];
        r.scheme = f[1];
        r.detector = f[2];
        r.nt = std::stoi(f[3]);
        r.nr = std::stoi(f[4]);
        r.nc = std::stoi(f[5]);
        r.m = std::stoi(f[6]);
        r.snr_db = std::stod(f[7]);
        r.ber = std::stod(f[8]);
        r.ci95 = std::stod(f[10]);
        r.bits_simulated = std::stoll(f[11]);
        r.source = f[12];
        r.seed = std::stoull(f[13]);
        r.spec_digest = std::stoull(f[14], nullptr, 16);
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw std::runtime_error("no header found in " + path);
    return rows;
}

namespace {

sim::BerCurve curve_from_rows(const std::vector<Row>& rows, const std::string& detector,
                              const std::string& path) {
    std::string want = detector;
    if (want.empty()) {
        for (const Row& r : rows) {
            if (r.source != "sim") continue;
            if (want.empty()) {
                want = r.detector;
            } else if (want != r.detector) {
                throw std::runtime_error(path + " holds several detectors; pick one explicitly");
            }
        }
        if (want.empty()) throw std::runtime_error(path + " holds no simulated rows");
    }
    sim::BerCurve curve;
    curve.detector = want == "ml" ? modem::Detector::ml : modem::Detector::lc;
    for (const Row& r : rows) {
        if (r.source != "sim" || r.detector != want) continue;
        sim::BerPoint p;
        p.snr_db = r.snr_db;
        p.ber = r.ber;
        p.ci95_halfwidth = r.ci95;
        p.bits_simulated = r.bits_simulated;
        curve.points.push_back(p);
    }
    if (curve.points.empty())
        throw std::runtime_error(path + " holds no simulated rows for detector " + want);
    std::sort(curve.points.begin(), curve.points.end(),
              [](const sim::BerPoint& a, const sim::BerPoint& b) { return a.snr_db < b.snr_db; });
    return curve;
}

} // namespace

double gap_from_files(const std::string& path_a, const std::string& path_b, double ber_level,
                      const std::string& detector_a, const std::string& detector_b) {
    const sim::BerCurve a = curve_from_rows(read_csv(path_a), detector_a, path_a);
    const sim::BerCurve b = curve_from_rows(read_csv(path_b), detector_b, path_b);
    return sim::gap_db_at_ber(a, b, ber_level);
}

} // namespace csim::results
