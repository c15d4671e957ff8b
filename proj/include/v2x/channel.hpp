#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>

namespace v2x {

enum class Band { v2i_2ghz, v2v_5_9ghz };

inline constexpr double kPrbBandwidthHz = 180e3;
inline constexpr double kTtiSeconds = 1e-3;
inline constexpr double kMaxSpectralEff = 6.0;  // ~64-QAM rate ceiling
inline constexpr double kThermalNoiseDbmHz = -174.0;
inline constexpr int kRxBranches = 2;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Per-link channel snapshot: large-scale terms held for a re-slice epoch,
/// fast fading refreshed every TTI for the PRBs actually used.
struct LinkState {
  int tx_id = 0;
  int rx_id = 0;
  Band band = Band::v2i_2ghz;
  double distance_m = 1.0;
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;
  Eigen::ArrayXXd fading_gain;  // n_prb x n_branches, unit-mean power gains

  double large_scale_db() const { return -(pathloss_db + shadowing_db); }
};

struct Interferer {
  const LinkState* link = nullptr;
  double tx_power_dbm = 0.0;
};

/// Macro curve 128.1 + 37.6 log10(d/km) at 2 GHz, floored at free space.
/// Distances below 1 m are clamped to 1 m.
double path_loss_v2i(double distance_m);

/// 63.3 + 20.4 log10(d/m) at 5.9 GHz, clamped at 1 m.
double path_loss_v2v(double distance_m);

double free_space_path_loss_db(double distance_m, double frequency_hz);

/// Thermal noise over one PRB plus receiver noise figure, in dBm.
double noise_dbm_per_prb(double noise_figure_db);

/// Post-combining SNR of a maximal ratio combiner: the sum of branch SNRs.
double mrc_combine(std::span<const double> branch_snr_linear);

/// SINR on one PRB: per-branch desired and interference powers through path
/// loss, shadowing and fading, MRC-combined on the desired signal. All
/// interferers must share the link's band.
double sinr_per_prb(const LinkState& link, int prb, std::span<const Interferer> interferers,
                    double tx_power_dbm, double noise_dbm);

/// Geometric mean of per-PRB linear SINRs over the allocated PRBs.
double effective_sinr(std::span<const double> per_prb_sinr_linear);

/// Truncated-Shannon map: floor(n_prb * 180 kHz * 1 ms * min(log2(1+sinr), 6)).
long long rate_from_sinr(double sinr_eff_linear, int n_prb);

/// Spectral efficiency the scheduler would run at the given SINR.
double spectral_efficiency(double sinr_eff_linear);

/// SINR (dB) that exactly supports the given spectral efficiency.
double mcs_threshold_db(double spectral_eff);

/// Error probability of the 3-point log-linear BLER ramp at offset
/// delta = sinr - threshold: 1 below -1 dB, 0.1 at 0 dB, 0 above +1 dB.
double bler_probability(double delta_db);

enum class TxOutcome { ack, nack };

TxOutcome transmission_outcome(double sinr_eff_db, double mcs_threshold_db,
                               std::mt19937_64& rng);

}  // namespace v2x
