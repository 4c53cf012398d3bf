#include "dronehaul/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dronehaul {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

namespace {

void require_positive(double d, const char* what)
{
  if (!(d > 0) || !std::isfinite(d)) throw std::domain_error(std::string(what) + " must be a positive distance");
}

double log_distance(double d, const RadioParams& radio)
{
  return radio.normalize_by_d0 ? std::log10(d / radio.d0_m) : std::log10(d);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double pl_direct_db(double d_m, const RadioParams& radio)
{
  require_positive(d_m, "d");
  return radio.pl_ref_db + 10.0 * radio.alpha * log_distance(d_m, radio);
}

double pl_ris_db(double d1_m, double d2_m, const RisPanel& panel, const RadioParams& radio)
{
  require_positive(d1_m, "d1");
  require_positive(d2_m, "d2");
  const double m = panel.elements_m;
  return radio.pl_ref_db + 10.0 * radio.beta * log_distance(m * m * (d1_m + d2_m), radio) - panel.gain_bf_db;
}

double effective_tx_dbm(const RadioParams& radio) { return std::min(radio.tx_power_dbm, radio.tx_power_max_dbm); }

double snr_db(double pl_db, const RadioParams& radio)
{
  return effective_tx_dbm(radio) + radio.g_tx_dbi + radio.g_rx_dbi - pl_db - radio.noise_dbm;
}

double capacity_bps(double snr_db, const RadioParams& radio)
{
  // log1p keeps precision for very low SNR; 10^(-inf/10) is exactly 0.
  return radio.eta * radio.b_eff_hz * std::log1p(db_to_linear(snr_db)) / std::log(2.0);
}

HopBudget hop_budget(const HopKind& kind, const RadioParams& radio)
{
  HopBudget b;
  b.pl_db = std::visit(overloaded{[&](const DirectHop& h) { return pl_direct_db(h.d_m, radio); },
                                  [&](const RisHop& h) { return pl_ris_db(h.d1_m, h.d2_m, h.panel.get(), radio); }},
                       kind);
  b.snr_db = snr_db(b.pl_db, radio);
  b.capacity_bps = capacity_bps(b.snr_db, radio);
  b.feasible = b.snr_db >= radio.snr_min_db;
  return b;
}

}  // namespace dronehaul
