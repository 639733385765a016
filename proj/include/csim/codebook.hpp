// Spreading-sequence codebooks: generation (Zadoff-Chu, cyclic-shift chirp),
// file interchange, cross-correlation metadata, and the canonical sequence
// pair enumeration used by the dual-sequence scheme.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "csim/mat.hpp"

namespace csim::codebook {

enum class Family { zadoff_chu, cyclic_chirp, file };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct SpreadingCodebook {
    int length_L = 0;
    int count_Nc = 0;
    Family family = Family::file;
    double symbol_energy_Es = 0.0;   // squared column norm, identical for all columns
    double max_cross_correlation = 0.0; // max |z_i^H z_j| / Es over i != j, 0 when Nc == 1
    std::vector<cvec> columns;       // count_Nc sequences of length_L chips

    const cvec& sequence(int index0) const { return columns.at(static_cast<size_t>(index0)); }
};

// L odd, roots distinct and coprime with L. Columns are scaled so that each
// sequence has energy target_es.
SpreadingCodebook gen_zadoff_chu(int length_L, const std::vector<int>& roots, double target_es = 1.0);

// Nc cyclic shifts of a length L = P*(2^SF - 1) base chirp, maximally spaced;
// shifts land on round(k*L/Nc). Distinct shifts are exactly orthogonal.
SpreadingCodebook gen_cyclic_chirp(int spreading_factor, int oversampling_P, int count_Nc,
                                   double target_es = 1.0);

SpreadingCodebook load_codebook(const std::string& path);
void save_codebook(const SpreadingCodebook& cb, const std::string& path);

// max_{i != j} |z_i^H z_j| / Es; requires Nc >= 2
double max_cross_correlation(const SpreadingCodebook& cb);

struct SequencePairSet {
    int pair_count_Ns = 0;
    std::vector<std::pair<int, int>> pairs; // 1-based (n_c1, n_c2), n_c1 < n_c2, canonical order

    // position of a sorted pair in the canonical list, or -1 when absent
    int index_of(int first1, int second1) const;
};

// Ns = 2^floor(log2(C(Nc,2))) lexicographically first 2-subsets of {1..Nc}
SequencePairSet enumerate_sequence_pairs(int count_Nc);

} // namespace csim::codebook
