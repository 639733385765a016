// Rayleigh block-fading channel draws with optional exponential spatial
// correlation (Kronecker model) and additive receiver-side CSI error.

#pragma once

#include <cmath>

#include "csim/mat.hpp"
#include "csim/rng.hpp"

namespace csim::channel {

struct ChannelConfig {
    int num_rx_Nr = 1;
    int num_tx_Nt = 1;
    double corr_r = 0.0;        // exponential correlation strength in [0, 1]
    double csi_error_var = 0.0; // variance of the additive estimation error
};

struct ChannelRealization {
    CMat H_true;
    CMat H_est;
};

struct NoiseConfig {
    double es_over_n0_db = 0.0;
    double symbol_energy_Es = 1.0;
    double n0() const { return symbol_energy_Es / std::pow(10.0, es_over_n0_db / 10.0); }
};

// n x n Toeplitz matrix with entries r^|i-j|, square-rooted through its
// eigendecomposition (negative rounding noise clamped at zero).
CMat correlation_sqrt(int n, double r);

class ChannelModel {
public:
    explicit ChannelModel(const ChannelConfig& cfg);
    ChannelRealization draw(RandomStream& stream) const;
    const ChannelConfig& config() const { return cfg_; }

private:
    ChannelConfig cfg_;
    bool correlated_ = false;
    CMat rr_sqrt_;
    CMat rt_sqrt_;
};

void add_awgn(CMat& m, double n0, RandomStream& stream);

double spreading_gain_db(int length_L);

} // namespace csim::channel
