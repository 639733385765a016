#include "csim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "csim/eig.hpp"

namespace csim::channel {

CMat correlation_sqrt(int n, double r) {
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("correlation strength must be in [0, 1]");
    CMat corr(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) corr(i, j) = std::pow(r, std::abs(i - j));
    return hermitian_sqrt(corr);
}

ChannelModel::ChannelModel(const ChannelConfig& cfg) : cfg_(cfg) {
    if (cfg.num_rx_Nr < 1 || cfg.num_tx_Nt < 1)
        throw std::invalid_argument("channel: antenna counts must be positive");
    if (cfg.corr_r < 0.0 || cfg.corr_r > 1.0)
        throw std::invalid_argument("channel: correlation strength must be in [0, 1]");
    if (cfg.csi_error_var < 0.0)
        throw std::invalid_argument("channel: CSI error variance must be nonnegative");
    correlated_ = cfg.corr_r > 0.0;
    if (correlated_) {
        rr_sqrt_ = correlation_sqrt(cfg.num_rx_Nr, cfg.corr_r);
        rt_sqrt_ = correlation_sqrt(cfg.num_tx_Nt, cfg.corr_r);
    }
}

ChannelRealization ChannelModel::draw(RandomStream& stream) const {
    const int nr = cfg_.num_rx_Nr;
    const int nt = cfg_.num_tx_Nt;
    CMat g(nr, nt);
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nt; ++c) g(r, c) = stream.next_cn();

    ChannelRealization out;
    out.H_true = correlated_ ? matmul(matmul(rr_sqrt_, g), rt_sqrt_) : std::move(g);
    if (cfg_.csi_error_var > 0.0) {
        const double sigma = std::sqrt(cfg_.csi_error_var);
        out.H_est = out.H_true;
        for (int r = 0; r < nr; ++r)
            for (int c = 0; c < nt; ++c) out.H_est(r, c) += sigma * stream.next_cn();
    } else {
        out.H_est = out.H_true;
    }
    return out;
}

void add_awgn(CMat& m, double n0, RandomStream& stream) {
    if (n0 < 0.0) throw std::invalid_argument("add_awgn: N0 must be nonnegative");
    if (n0 == 0.0) return;
    const double sigma = std::sqrt(n0);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) m(r, c) += sigma * stream.next_cn();
}

double spreading_gain_db(int length_L) {
    if (length_L < 1) throw std::invalid_argument("spreading_gain_db: L must be >= 1");
    return 10.0 * std::log10(static_cast<double>(length_L));
}

} // namespace csim::channel
