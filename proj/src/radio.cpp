#include "ilac/radio.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "ilac/error.hpp"

namespace ilac::radio {

double NoiseModel::psd_w_per_hz() const {
  if (!std::isfinite(psd_dbm_per_hz)) throw InvalidArgument("noise PSD must be finite");
  return std::pow(10.0, (psd_dbm_per_hz - 30.0) / 10.0);
}

double path_loss_db(double distance_km) {
  if (!(distance_km > 0.0)) throw InvalidArgument("path_loss_db: distance must be positive");
  return 128.1 + 37.6 * std::log10(distance_km);
}

double gain_from_db(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

ChannelState ChannelState::from_distance(std::size_t client_id, double distance_km) {
  const double pl = radio::path_loss_db(distance_km);
  return {client_id, distance_km, pl, gain_from_db(pl)};
}

ChannelState ChannelState::from_gain(std::size_t client_id, double gain) {
  if (!(gain > 0.0)) throw InvalidArgument("ChannelState: gain must be positive");
  const double pl = -10.0 * std::log10(gain);
  // Invert the path-loss law so distance stays consistent with the gain.
  const double km = std::pow(10.0, (pl - 128.1) / 37.6);
  return {client_id, km, pl, gain};
}

double snr_bandwidth(double power_w, double gain, const NoiseModel& noise) {
  return power_w * gain / noise.psd_w_per_hz();
}

double rate_from_snr_bandwidth(double bandwidth_hz, double c) {
  if (!(bandwidth_hz > 0.0) || !(c > 0.0)) return 0.0;
  return bandwidth_hz * std::log1p(c / bandwidth_hz) / std::numbers::ln2;
}

double rate(double bandwidth_hz, double power_w, double gain, const NoiseModel& noise) {
  if (!(bandwidth_hz > 0.0) || !(power_w > 0.0) || !(gain > 0.0)) return 0.0;
  return rate_from_snr_bandwidth(bandwidth_hz, snr_bandwidth(power_w, gain, noise));
}

double tx_time(double size_bits, double rate_bps) {
  if (!(rate_bps > 0.0)) throw InfeasibleRate("tx_time: rate must be positive");
  return size_bits / rate_bps;
}

double fl_round_time(double compute_s, double model_bits, double rate_bps, double aggregation_s) {
  if (!(rate_bps > 0.0)) throw InfeasibleRate("fl_round_time: rate must be positive");
  return compute_s + 2.0 * model_bits / rate_bps + aggregation_s;
}

double sl_round_time(double compute_s, double samples, double smashed_bits_per_sample,
                     double rate_bps, double clients, double local_fraction, double model_bits) {
  if (!(rate_bps > 0.0)) throw InfeasibleRate("sl_round_time: rate must be positive");
  if (local_fraction < 0.0 || local_fraction > 1.0) {
    throw InvalidArgument("sl_round_time: beta must lie in [0, 1]");
  }
  return compute_s + 2.0 * samples * smashed_bits_per_sample / rate_bps +
         2.0 * clients * local_fraction * model_bits / rate_bps;
}

double round_payload_bits(const FlPayload& p) { return 2.0 * p.clients * p.model_bits; }

double round_payload_bits(const SlPayload& p) {
  return 2.0 * (p.samples * p.smashed_bits_per_sample + p.clients * p.local_fraction * p.model_bits);
}

double comm_overhead(double rounds, const FlPayload& p) { return rounds * round_payload_bits(p); }

double comm_overhead(double rounds, const SlPayload& p) { return rounds * round_payload_bits(p); }

double RadioAllocation::total_bandwidth() const {
  return std::accumulate(bandwidth.begin(), bandwidth.end(), 0.0);
}

}  // namespace ilac::radio
