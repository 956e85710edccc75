#pragma once

// Uplink channel, rate and latency models, plus round-time / overhead calculators
// for federated (FL) and split (SL) learning.
//
// Units: distance in km, path loss in dB, gain linear, bandwidth in Hz, power in W,
// sizes in bits, rates in bit/s, times in seconds. Noise is a power spectral
// density in dBm/Hz, so the noise power in band b is N0 * b.

#include <cstddef>
#include <vector>

namespace ilac::radio {

struct NoiseModel {
  double psd_dbm_per_hz = -134.0;

  // N0 in W/Hz.
  double psd_w_per_hz() const;
};

// 128.1 + 37.6 log10(d_km). Throws InvalidArgument if distance_km <= 0.
double path_loss_db(double distance_km);
double gain_from_db(double path_loss_db);

struct ChannelState {
  std::size_t client_id = 0;
  double distance_km = 0.0;
  double path_loss_db = 0.0;
  double gain = 0.0;

  static ChannelState from_distance(std::size_t client_id, double distance_km);
  // For hand-built scenarios; path loss is derived from the gain.
  static ChannelState from_gain(std::size_t client_id, double gain);
};

// p * gain / N0: the SNR a client would see in 1 Hz of bandwidth (units of Hz).
double snr_bandwidth(double power_w, double gain, const NoiseModel& noise);

// b log2(1 + p g / (N0 b)); 0 when b or p is 0. Computed with log1p so the wide-band
// limit c / ln 2 is reached without cancellation.
double rate(double bandwidth_hz, double power_w, double gain, const NoiseModel& noise);
// Same, from the precomputed c = p g / N0.
double rate_from_snr_bandwidth(double bandwidth_hz, double c);

// size / r. Throws InfeasibleRate when r == 0.
double tx_time(double size_bits, double rate_bps);

// T + 2 s / r + T_agg.
double fl_round_time(double compute_s, double model_bits, double rate_bps, double aggregation_s);

// T + 2 d q / r + 2 N beta s / r.
double sl_round_time(double compute_s, double samples, double smashed_bits_per_sample,
                     double rate_bps, double clients, double local_fraction, double model_bits);

struct FlPayload {
  double clients = 0.0;
  double model_bits = 0.0;
};

struct SlPayload {
  double samples = 0.0;
  double smashed_bits_per_sample = 0.0;
  double clients = 0.0;
  double local_fraction = 0.0;
  double model_bits = 0.0;
};

// Per-round payload S_p.
double round_payload_bits(const FlPayload& p);  // 2 N s
double round_payload_bits(const SlPayload& p);  // 2 (d q + N beta s)

// Total overhead M * S_p.
double comm_overhead(double rounds, const FlPayload& p);
double comm_overhead(double rounds, const SlPayload& p);

struct RadioAllocation {
  std::vector<double> bandwidth;  // Hz, one per client
  std::vector<double> power;      // W, one per client

  double total_bandwidth() const;
};

}  // namespace ilac::radio
