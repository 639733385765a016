#include "csim/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace csim::codebook {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; static_cast<long long>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

int gcd_int(int a, int b) {
    while (b != 0) {
        const int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Validates per-column energy uniformity, records Es and the cross-correlation
// profile. energy_rel_tol differs between generated (1e-9) and loaded (1e-6)
// codebooks.
void finalize(SpreadingCodebook& cb, double energy_rel_tol, bool enforce_count_bound) {
    if (cb.count_Nc < 1) throw std::invalid_argument("codebook: Nc must be >= 1");
    if (enforce_count_bound && cb.count_Nc > cb.length_L)
        throw std::invalid_argument("codebook: Nc exceeds sequence length L");
    double e0 = norm2(cb.columns[0]);
    if (e0 <= 0.0) throw std::invalid_argument("codebook: zero-energy sequence");
    double emin = e0, emax = e0;
    for (const cvec& col : cb.columns) {
        if (static_cast<int>(col.size()) != cb.length_L)
            throw std::invalid_argument("codebook: column length mismatch");
        const double e = norm2(col);
        emin = std::min(emin, e);
        emax = std::max(emax, e);
    }
    if ((emax - emin) / emax > energy_rel_tol)
        throw std::invalid_argument("codebook: column energies are not uniform");
    cb.symbol_energy_Es = 0.0;
    for (const cvec& col : cb.columns) cb.symbol_energy_Es += norm2(col);
    cb.symbol_energy_Es /= cb.count_Nc;
    cb.max_cross_correlation = cb.count_Nc >= 2 ? max_cross_correlation(cb) : 0.0;
}

void check_family_bound(const SpreadingCodebook& cb, bool chirp_shifts_distinct) {
    if (cb.count_Nc < 2) return;
    if (cb.family == Family::zadoff_chu && is_prime(cb.length_L)) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cb.length_L)) + 1e-9;
        if (cb.max_cross_correlation > bound)
            throw std::runtime_error("zadoff_chu codebook exceeds the 1/sqrt(L) correlation bound");
    }
    if (cb.family == Family::cyclic_chirp && chirp_shifts_distinct) {
        if (cb.max_cross_correlation > 1e-9)
            throw std::runtime_error("cyclic_chirp codebook with distinct shifts is not orthogonal");
    }
}

std::string format_complex(cd v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
    return buf;
}

cd parse_complex(const std::string& tok, int line_no) {
    const auto fail = [&]() -> cd {
        throw std::runtime_error("codebook file: malformed complex value at line " +
                                 std::to_string(line_no) + ": '" + tok + "'");
    };
    if (tok.empty() || tok.back() != 'i') return fail();
    // split at the sign of the imaginary part (not an exponent sign)
    size_t split = std::string::npos;
    for (size_t i = tok.size() - 1; i > 0; --i) {
        const char c = tok[i];
        if ((c == '+' || c == '-') && tok[i - 1] != 'e' && tok[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos || split == 0) return fail();
    const std::string re_s = tok.substr(0, split);
    const std::string im_s = tok.substr(split, tok.size() - 1 - split);
    char* end = nullptr;
    const double re = std::strtod(re_s.c_str(), &end);
    if (end == re_s.c_str() || *end != '\0') return fail();
    const double im = std::strtod(im_s.c_str(), &end);
    if (end == im_s.c_str() || *end != '\0') return fail();
    return {re, im};
}

} // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::zadoff_chu: return "zadoff_chu";
        case Family::cyclic_chirp: return "cyclic_chirp";
        case Family::file: return "file";
    }
    return "file";
}

Family family_from_name(const std::string& name) {
    if (name == "zadoff_chu") return Family::zadoff_chu;
    if (name == "cyclic_chirp") return Family::cyclic_chirp;
    if (name == "file") return Family::file;
    throw std::invalid_argument("unknown codebook family: " + name);
}

SpreadingCodebook gen_zadoff_chu(int length_L, const std::vector<int>& roots, double target_es) {
    if (length_L < 1 || length_L % 2 == 0)
        throw std::invalid_argument("gen_zadoff_chu: L must be odd and positive");
    if (roots.empty()) throw std::invalid_argument("gen_zadoff_chu: no roots given");
    if (target_es <= 0.0) throw std::invalid_argument("gen_zadoff_chu: Es must be positive");
    for (size_t i = 0; i < roots.size(); ++i) {
        const int u = roots[i];
        if (u < 1 || u > length_L - 1 || gcd_int(u, length_L) != 1)
            throw std::invalid_argument("gen_zadoff_chu: root " + std::to_string(u) +
                                        " is not coprime with L or out of range");
        for (size_t j = i + 1; j < roots.size(); ++j)
            if (roots[j] == u) throw std::invalid_argument("gen_zadoff_chu: duplicate root");
    }

    SpreadingCodebook cb;
    cb.length_L = length_L;
    cb.count_Nc = static_cast<int>(roots.size());
    cb.family = Family::zadoff_chu;
    const double amp = std::sqrt(target_es / length_L);
    for (const int u : roots) {
        cvec col(length_L);
        for (int n = 0; n < length_L; ++n) {
            // phase argument reduced modulo 2L to keep precision for long sequences
            const long long k = (static_cast<long long>(u) * n % (2LL * length_L)) * (n + 1) %
                                (2LL * length_L);
            const double phase = -kPi * static_cast<double>(k) / length_L;
            col[n] = amp * cd(std::cos(phase), std::sin(phase));
        }
        cb.columns.push_back(std::move(col));
    }
    finalize(cb, 1e-9, true);
    check_family_bound(cb, false);
    return cb;
}

SpreadingCodebook gen_cyclic_chirp(int spreading_factor, int oversampling_P, int count_Nc,
                                   double target_es) {
    if (spreading_factor < 1) throw std::invalid_argument("gen_cyclic_chirp: SF must be >= 1");
    if (oversampling_P < 1) throw std::invalid_argument("gen_cyclic_chirp: P must be >= 1");
    const long long grid = 1LL << spreading_factor;
    if (count_Nc < 1 || count_Nc > grid)
        throw std::invalid_argument("gen_cyclic_chirp: Nc must be in 1..2^SF");
    if (target_es <= 0.0) throw std::invalid_argument("gen_cyclic_chirp: Es must be positive");

    const int L = oversampling_P * (static_cast<int>(grid) - 1);
    cvec base(L);
    if (L % 2 == 1) {
        for (int n = 0; n < L; ++n) {
            const long long k = (static_cast<long long>(n) * (n + 1)) % (2LL * L);
            const double phase = -kPi * static_cast<double>(k) / L;
            base[n] = cd(std::cos(phase), std::sin(phase));
        }
    } else {
        for (int n = 0; n < L; ++n) {
            const long long k = (static_cast<long long>(n) * n) % (2LL * L);
            const double phase = -kPi * static_cast<double>(k) / L;
            base[n] = cd(std::cos(phase), std::sin(phase));
        }
    }

    SpreadingCodebook cb;
    cb.length_L = L;
    cb.count_Nc = count_Nc;
    cb.family = Family::cyclic_chirp;
    const double amp = std::sqrt(target_es / L);
    std::vector<int> shifts(count_Nc);
    for (int k = 0; k < count_Nc; ++k) {
        const double pos = static_cast<double>(k) * L / count_Nc; // maximal equal spacing
        shifts[k] = static_cast<int>(std::llround(pos)) % L;
    }
    for (int k = 0; k < count_Nc; ++k) {
        cvec col(L);
        for (int n = 0; n < L; ++n) col[n] = amp * base[(n - shifts[k] % L + L) % L];
        cb.columns.push_back(std::move(col));
    }
    // Nc > L can only happen for P = 1 where fewer than Nc distinct shifts
    // exist; the duplicate columns then show up in max_cross_correlation.
    std::vector<int> sorted_shifts = shifts;
    std::sort(sorted_shifts.begin(), sorted_shifts.end());
    const bool distinct =
        std::adjacent_find(sorted_shifts.begin(), sorted_shifts.end()) == sorted_shifts.end();
    finalize(cb, 1e-9, false);
    check_family_bound(cb, distinct);
    return cb;
}

double max_cross_correlation(const SpreadingCodebook& cb) {
    if (cb.count_Nc < 2)
        throw std::invalid_argument("max_cross_correlation: need at least two sequences");
    double es = 0.0;
    for (const cvec& col : cb.columns) es += norm2(col);
    es /= cb.count_Nc;
    double best = 0.0;
    for (int i = 0; i < cb.count_Nc; ++i)
        for (int j = i + 1; j < cb.count_Nc; ++j)
            best = std::max(best, std::abs(vdot(cb.columns[i], cb.columns[j])) / es);
    return best;
}

void save_codebook(const SpreadingCodebook& cb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_codebook: cannot open " + path);
    out << "L " << cb.length_L << "\n";
    out << "Nc " << cb.count_Nc << "\n";
    out << "family " << family_name(cb.family) << "\n";
    for (int n = 0; n < cb.length_L; ++n) {
        for (int c = 0; c < cb.count_Nc; ++c) {
            if (c) out << ' ';
            out << format_complex(cb.columns[c][n]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_codebook: write failed for " + path);
}

SpreadingCodebook load_codebook(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_codebook: cannot open " + path);
    std::string key;
    int L = 0, Nc = 0;
    std::string fam;
    if (!(in >> key) || key != "L" || !(in >> L) || L < 1)
        throw std::runtime_error("codebook file: bad or missing L header");
    if (!(in >> key) || key != "Nc" || !(in >> Nc) || Nc < 1)
        throw std::runtime_error("codebook file: bad or missing Nc header");
    if (!(in >> key) || key != "family" || !(in >> fam))
        throw std::runtime_error("codebook file: bad or missing family header");

    SpreadingCodebook cb;
    cb.length_L = L;
    cb.count_Nc = Nc;
    cb.family = family_from_name(fam);
    cb.columns.assign(Nc, cvec(L));
    for (int n = 0; n < L; ++n) {
        for (int c = 0; c < Nc; ++c) {
            std::string tok;
            if (!(in >> tok))
                throw std::runtime_error("codebook file: truncated at row " + std::to_string(n));
            cb.columns[c][n] = parse_complex(tok, 4 + n);
        }
    }
    std::string trailing;
    if (in >> trailing) throw std::runtime_error("codebook file: trailing data after matrix");
    finalize(cb, 1e-6, cb.family != Family::cyclic_chirp);
    return cb;
}

SequencePairSet enumerate_sequence_pairs(int count_Nc) {
    if (count_Nc < 2)
        throw std::invalid_argument("enumerate_sequence_pairs: need at least two sequences");
    const uint64_t total = static_cast<uint64_t>(count_Nc) * (count_Nc - 1) / 2;
    uint64_t ns = 1;
    while (ns * 2 <= total) ns *= 2;
    SequencePairSet out;
    out.pair_count_Ns = static_cast<int>(ns);
    out.pairs.reserve(ns);
    for (int a = 1; a <= count_Nc && out.pairs.size() < ns; ++a)
        for (int b = a + 1; b <= count_Nc && out.pairs.size() < ns; ++b)
            out.pairs.emplace_back(a, b);
    return out;
}

int SequencePairSet::index_of(int first1, int second1) const {
    for (size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].first == first1 && pairs[i].second == second1) return static_cast<int>(i);
    return -1;
}

} // namespace csim::codebook
