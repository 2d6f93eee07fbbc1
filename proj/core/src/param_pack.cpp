#include "hotstate/param_pack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace hotstate::detail {

namespace {

std::string indexed(const std::string& base, std::size_t j) {
  return base + "[" + std::to_string(j) + "]";
}

}  // namespace

ParamPacker::ParamPacker(ModelSpec init, bool tau_latent,
                         std::set<std::string> fixed)
    : init_(std::move(init)), tau_latent_(tau_latent) {
  validate(init_);
  if (tau_latent_) validate(init_.tau_dist);
  build_slots();

  std::set<std::string> unknown = fixed;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (fixed.count(slots_[i].name)) {
      unknown.erase(slots_[i].name);
      continue;
    }
    free_.push_back(i);
    free_names_.push_back(slots_[i].name);
  }
  if (!unknown.empty())
    throw std::invalid_argument("ParamPacker: unknown fixed parameter '" +
                                *unknown.begin() + "'");
}

void ParamPacker::build_slots() {
  auto add = [&](std::string name, bool log_scale,
                 std::function<double(const ModelSpec&)> get,
                 std::function<void(ModelSpec&, double)> set) {
    slots_.push_back({std::move(name), log_scale, std::move(get), std::move(set)});
  };

  if (std::holds_alternative<ConstantBaseline>(init_.regular_baseline)) {
    add("lambda0", true,
        [](const ModelSpec& s) {
          return std::get<ConstantBaseline>(s.regular_baseline).rate;
        },
        [](ModelSpec& s, double v) {
          std::get<ConstantBaseline>(s.regular_baseline).rate = v;
        });
  } else if (const auto* pw =
                 std::get_if<PiecewiseConstantBaseline>(&init_.regular_baseline)) {
    for (std::size_t j = 0; j < pw->levels.size(); ++j) {
      add(indexed("lambda0", j), true,
          [j](const ModelSpec& s) {
            return std::get<PiecewiseConstantBaseline>(s.regular_baseline).levels[j];
          },
          [j](ModelSpec& s, double v) {
            std::get<PiecewiseConstantBaseline>(s.regular_baseline).levels[j] = v;
          });
    }
  } else {
    auto field = [](LogDoubleExpBaseline& b, int k) -> double& {
      switch (k) {
        case 1: return b.theta1;
        case 2: return b.theta2;
        case 3: return b.theta3;
        default: return b.theta4;
      }
    };
    for (int k = 1; k <= 4; ++k) {
      add("theta" + std::to_string(k), k >= 3,
          [k, field](const ModelSpec& s) {
            auto b = std::get<LogDoubleExpBaseline>(s.regular_baseline);
            return field(b, k);
          },
          [k, field](ModelSpec& s, double v) {
            field(std::get<LogDoubleExpBaseline>(s.regular_baseline), k) = v;
          });
    }
  }

  if (std::holds_alternative<ProportionalHot>(init_.hot_baseline)) {
    add("nu", false,
        [](const ModelSpec& s) {
          return std::get<ProportionalHot>(s.hot_baseline).nu;
        },
        [](ModelSpec& s, double v) {
          std::get<ProportionalHot>(s.hot_baseline).nu = v;
        });
  } else if (std::holds_alternative<ConstantBaseline>(init_.hot_baseline)) {
    add("lambda1", true,
        [](const ModelSpec& s) {
          return std::get<ConstantBaseline>(s.hot_baseline).rate;
        },
        [](ModelSpec& s, double v) {
          std::get<ConstantBaseline>(s.hot_baseline).rate = v;
        });
  } else if (const auto* pw =
                 std::get_if<PiecewiseConstantBaseline>(&init_.hot_baseline)) {
    for (std::size_t j = 0; j < pw->levels.size(); ++j) {
      add(indexed("lambda1", j), true,
          [j](const ModelSpec& s) {
            return std::get<PiecewiseConstantBaseline>(s.hot_baseline).levels[j];
          },
          [j](ModelSpec& s, double v) {
            std::get<PiecewiseConstantBaseline>(s.hot_baseline).levels[j] = v;
          });
    }
  } else {
    auto field = [](LogDoubleExpBaseline& b, int k) -> double& {
      switch (k) {
        case 1: return b.theta1;
        case 2: return b.theta2;
        case 3: return b.theta3;
        default: return b.theta4;
      }
    };
    for (int k = 1; k <= 4; ++k) {
      add("theta" + std::to_string(k) + "_hot", k >= 3,
          [k, field](const ModelSpec& s) {
            auto b = std::get<LogDoubleExpBaseline>(s.hot_baseline);
            return field(b, k);
          },
          [k, field](ModelSpec& s, double v) {
            field(std::get<LogDoubleExpBaseline>(s.hot_baseline), k) = v;
          });
    }
  }

  const bool distinct_beta = init_.beta_hot.has_value();
  const std::string reg_name = distinct_beta ? "beta_reg" : "beta";
  for (std::size_t j = 0; j < init_.beta_regular.size(); ++j) {
    add(indexed(reg_name, j), false,
        [j](const ModelSpec& s) { return s.beta_regular[j]; },
        [j](ModelSpec& s, double v) { s.beta_regular[j] = v; });
  }
  if (distinct_beta) {
    for (std::size_t j = 0; j < init_.beta_hot->size(); ++j) {
      add(indexed("beta_hot", j), false,
          [j](const ModelSpec& s) { return (*s.beta_hot)[j]; },
          [j](ModelSpec& s, double v) { (*s.beta_hot)[j] = v; });
    }
  }

  if (tau_latent_) {
    add("tau_shape", true,
        [](const ModelSpec& s) { return s.tau_dist.shape; },
        [](ModelSpec& s, double v) { s.tau_dist.shape = v; });
    add("tau_rate", true,
        [](const ModelSpec& s) { return s.tau_dist.rate; },
        [](ModelSpec& s, double v) { s.tau_dist.rate = v; });
  }
}

std::vector<double> ParamPacker::pack(const ModelSpec& spec) const {
  std::vector<double> x(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const Slot& slot = slots_[free_[i]];
    const double v = slot.get(spec);
    if (slot.log_scale) {
      if (!(v > 0.0))
        throw std::invalid_argument("ParamPacker: '" + slot.name +
                                    "' must be positive to pack");
      x[i] = std::log(v);
    } else {
      x[i] = v;
    }
  }
  return x;
}

namespace {

// exp(u) clamped away from exact 0 and inf: line searches and acceleration
// steps probe wild coordinates, and the objective there must come back as
// astronomically bad rather than as a special-function domain error
double bounded_exp(double u) {
  return std::exp(std::clamp(u, -690.0, 690.0));
}

}  // namespace

ModelSpec ParamPacker::unpack(const std::vector<double>& x) const {
  if (x.size() != free_.size())
    throw std::invalid_argument("ParamPacker: coordinate dimension mismatch");
  ModelSpec spec = init_;
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const Slot& slot = slots_[free_[i]];
    slot.set(spec, slot.log_scale ? bounded_exp(x[i]) : x[i]);
  }
  return spec;
}

std::vector<double> ParamPacker::natural(const std::vector<double>& x) const {
  std::vector<double> v(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i)
    v[i] = slots_[free_[i]].log_scale ? bounded_exp(x[i]) : x[i];
  return v;
}

std::vector<double> ParamPacker::natural_scale(
    const std::vector<double>& x) const {
  std::vector<double> v(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i)
    v[i] = slots_[free_[i]].log_scale ? std::exp(x[i]) : 1.0;
  return v;
}

std::vector<std::string> ParamPacker::all_names() const {
  std::vector<std::string> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.name);
  return out;
}

double ParamPacker::get_value(const ModelSpec& spec,
                              const std::string& name) const {
  for (const auto& s : slots_)
    if (s.name == name) return s.get(spec);
  throw std::invalid_argument("unknown parameter \"" + name + "\"");
}

void ParamPacker::set_value(ModelSpec& spec, const std::string& name,
                            double value) const {
  for (const auto& s : slots_) {
    if (s.name == name) {
      s.set(spec, value);
      return;
    }
  }
  throw std::invalid_argument("unknown parameter \"" + name + "\"");
}

}  // namespace hotstate::detail
