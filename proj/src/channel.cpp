#include "v2x/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace v2x {

double free_space_path_loss_db(double distance_m, double frequency_hz) {
  // 20 log10(4 pi d f / c)
  constexpr double c = 299792458.0;
  return 20.0 * std::log10(4.0 * M_PI * distance_m * frequency_hz / c);
}

double path_loss_v2i(double distance_m) {
  double d = std::max(distance_m, 1.0);
  double macro = 128.1 + 37.6 * std::log10(d / 1000.0);
  return std::max(macro, free_space_path_loss_db(d, 2.0e9));
}

double path_loss_v2v(double distance_m) {
  double d = std::max(distance_m, 1.0);
  return 63.3 + 20.4 * std::log10(d);
}

double noise_dbm_per_prb(double noise_figure_db) {
  return kThermalNoiseDbmHz + 10.0 * std::log10(kPrbBandwidthHz) + noise_figure_db;
}

double mrc_combine(std::span<const double> branch_snr_linear) {
  if (branch_snr_linear.empty())
    throw std::invalid_argument("mrc_combine: no branches");
  double sum = 0.0;
  for (double s : branch_snr_linear) sum += s;
  return sum;
}

double sinr_per_prb(const LinkState& link, int prb, std::span<const Interferer> interferers,
                    double tx_power_dbm, double noise_dbm) {
  for (const auto& it : interferers) {
    if (it.link->band != link.band)
      throw std::invalid_argument("sinr_per_prb: interferer band mismatch (slice isolation)");
  }
  double s_rx = db_to_linear(tx_power_dbm + link.large_scale_db());
  double noise = db_to_linear(noise_dbm);
  int branches = static_cast<int>(link.fading_gain.cols());
  if (branches < 1 || branches > 8)
    throw std::invalid_argument("sinr_per_prb: unsupported receive branch count");
  double branch_sinr[8];
  for (int b = 0; b < branches; ++b) {
    double interference = 0.0;
    for (const auto& it : interferers) {
      double i_rx = db_to_linear(it.tx_power_dbm + it.link->large_scale_db());
      interference += i_rx * it.link->fading_gain(prb, b);
    }
    branch_sinr[b] = s_rx * link.fading_gain(prb, b) / (noise + interference);
  }
  return mrc_combine(std::span<const double>(branch_sinr, branches));
}

double effective_sinr(std::span<const double> per_prb_sinr_linear) {
  if (per_prb_sinr_linear.empty())
    throw std::invalid_argument("effective_sinr: empty input");
  double log_sum = 0.0;
  for (double s : per_prb_sinr_linear) log_sum += std::log(s);
  return std::exp(log_sum / static_cast<double>(per_prb_sinr_linear.size()));
}

double spectral_efficiency(double sinr_eff_linear) {
  return std::min(std::log2(1.0 + sinr_eff_linear), kMaxSpectralEff);
}

long long rate_from_sinr(double sinr_eff_linear, int n_prb) {
  if (n_prb < 0) throw std::invalid_argument("rate_from_sinr: n_prb must be >= 0");
  double bits = n_prb * kPrbBandwidthHz * kTtiSeconds * spectral_efficiency(sinr_eff_linear);
  return static_cast<long long>(std::floor(bits));
}

double mcs_threshold_db(double spectral_eff) {
  return linear_to_db(std::pow(2.0, spectral_eff) - 1.0);
}

double bler_probability(double delta_db) {
  if (delta_db < -1.0) return 1.0;
  if (delta_db > 1.0) return 0.0;
  return std::pow(10.0, -(delta_db + 1.0));  // 1 at -1 dB, 0.1 at 0 dB
}

TxOutcome transmission_outcome(double sinr_eff_db, double threshold_db, std::mt19937_64& rng) {
  double p = bler_probability(sinr_eff_db - threshold_db);
  if (p <= 0.0) return TxOutcome::ack;
  if (p >= 1.0) return TxOutcome::nack;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return unit(rng) < p ? TxOutcome::nack : TxOutcome::ack;
}

}  // namespace v2x
