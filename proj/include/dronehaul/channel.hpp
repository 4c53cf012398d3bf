#pragma once

#include <functional>
#include <variant>

#include "dronehaul/types.hpp"

namespace dronehaul {

double db_to_linear(double db);
double linear_to_db(double linear);

/// Log-distance loss of a direct LoS hop:
/// PL(d0) + 10 alpha log10(d / d0), or log10(d) when normalize_by_d0 is off.
/// Throws std::domain_error for d <= 0.
double pl_direct_db(double d_m, const RadioParams& radio);

/// Loss of a hop reflected by a RIS panel. The two legs enter a single
/// logarithm, PL(d0) + 10 beta log10(M^2 (d1 + d2) / d0) - g_bf, so the hop
/// cannot be split into two additive edge weights.
double pl_ris_db(double d1_m, double d2_m, const RisPanel& panel, const RadioParams& radio);

/// Effective transmit power: configured power capped at P_max.
double effective_tx_dbm(const RadioParams& radio);

/// Received SNR in dB for a hop with the given path loss; the channel gain is
/// G_tx * G_rx * 10^(-PL/10) in linear terms.
double snr_db(double pl_db, const RadioParams& radio);

/// eta * B_eff * log2(1 + snr), bit/s.
double capacity_bps(double snr_db, const RadioParams& radio);

struct HopBudget {
  double pl_db = 0.0;
  double snr_db = 0.0;
  double capacity_bps = 0.0;
  bool feasible = false;
};

struct DirectHop {
  double d_m;
};

struct RisHop {
  double d1_m;
  double d2_m;
  std::reference_wrapper<const RisPanel> panel;
};

using HopKind = std::variant<DirectHop, RisHop>;

/// Path loss, SNR, capacity and the SNR_min feasibility flag of one hop.
HopBudget hop_budget(const HopKind& kind, const RadioParams& radio);

}  // namespace dronehaul
