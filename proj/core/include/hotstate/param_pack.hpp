#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hotstate/process_model.hpp"

namespace hotstate::detail {

// Bijection between a ModelSpec and an unconstrained coordinate vector for
// the optimizer: rates and gamma parameters on log scale, beta / nu / the
// smooth-baseline shape coefficients raw.  Slot names:
//   lambda0, lambda0[j]          regular constant / piecewise levels
//   theta1..theta4               regular smooth baseline
//   nu | lambda1, lambda1[j] | theta1_hot..theta4_hot   hot branch
//   beta[j]                      shared coefficients (proportional hot)
//   beta_reg[j], beta_hot[j]     distinct coefficients
//   tau_shape, tau_rate          gamma duration law (latent-tau fits only)
// Names in `fixed` are excluded from the vector and pinned at their values
// in `init`.
class ParamPacker {
 public:
  ParamPacker(ModelSpec init, bool tau_latent,
              std::set<std::string> fixed = {});

  std::size_t dim() const { return free_.size(); }
  const std::vector<std::string>& names() const { return free_names_; }

  std::vector<double> pack(const ModelSpec& spec) const;
  ModelSpec unpack(const std::vector<double>& x) const;

  // Natural-scale values and |d natural / d unconstrained| at x, aligned
  // with names(); the scale vector is the delta-method factor for SEs.
  std::vector<double> natural(const std::vector<double>& x) const;
  std::vector<double> natural_scale(const std::vector<double>& x) const;

  // Name-addressed natural-scale access covering every slot, fixed ones
  // included; unknown names throw.
  std::vector<std::string> all_names() const;
  double get_value(const ModelSpec& spec, const std::string& name) const;
  void set_value(ModelSpec& spec, const std::string& name, double value) const;

 private:
  struct Slot {
    std::string name;
    bool log_scale = false;
    std::function<double(const ModelSpec&)> get;
    std::function<void(ModelSpec&, double)> set;
  };

  void build_slots();

  ModelSpec init_;
  bool tau_latent_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> free_;
  std::vector<std::string> free_names_;
};

}  // namespace hotstate::detail
