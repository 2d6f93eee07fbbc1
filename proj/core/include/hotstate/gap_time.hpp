#pragma once

namespace hotstate {

class Rng;

// Waiting time until the next event when every event opens a hot window of
// known length tau: hazard lambda1 on (0, tau], lambda0 afterwards.  The
// density is exponential on each side of the change point, with the second
// branch carrying the survival factor exp(-(lambda1-lambda0)*tau).
struct ChangePointExp {
  double lambda0 = 0.0;  // rate once the hot window has expired
  double lambda1 = 0.0;  // rate inside the hot window
  double tau = 0.0;      // hot-window length, >= 0
};

double gap_pdf(const ChangePointExp& d, double y);
double gap_cdf(const ChangePointExp& d, double y);
double gap_quantile(const ChangePointExp& d, double p);  // p in [0,1)
double gap_sample(const ChangePointExp& d, Rng& rng);

}  // namespace hotstate
