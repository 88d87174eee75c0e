#include "stabx/perturb/plan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"

namespace stabx::perturb {

std::string_view to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::split:
      return "split";
    case PlanKind::subsample:
      return "subsample";
    case PlanKind::noise:
      return "noise";
  }
  return "unknown";
}

std::string_view to_string(NoiseDistribution dist) {
  return dist == NoiseDistribution::normal ? "normal" : "laplace";
}

PlanKind parse_plan_kind(std::string_view text) {
  if (text == "split") return PlanKind::split;
  if (text == "subsample") return PlanKind::subsample;
  if (text == "noise") return PlanKind::noise;
  throw ValidationError("unknown perturbation kind '" + std::string(text) + "'");
}

NoiseDistribution parse_distribution(std::string_view text) {
  if (text == "normal") return NoiseDistribution::normal;
  if (text == "laplace") return NoiseDistribution::laplace;
  throw ValidationError("unknown noise distribution '" + std::string(text) + "'");
}

namespace {

std::size_t rounded_size(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

RepeatDraw draw_subset(std::size_t n, std::size_t keep, std::uint64_t seed,
                       bool keep_rest) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.partial_shuffle(idx, keep);
  RepeatDraw draw;
  draw.seed = seed;
  draw.retained.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(draw.retained.begin(), draw.retained.end());
  if (keep_rest) {
    draw.held_out.assign(idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end());
    std::sort(draw.held_out.begin(), draw.held_out.end());
  }
  return draw;
}

void check_repeats(std::size_t repeats) {
  if (repeats < 2) throw ValidationError("a plan needs at least 2 repeats");
}

}  // namespace

PerturbationPlan make_splits(std::size_t n_samples, double ratio,
                             std::size_t repeats, std::uint64_t base_seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("split ratio must lie in (0, 1)");
  }
  check_repeats(repeats);
  const std::size_t n_train = rounded_size(n_samples, ratio);
  if (n_train == 0 || n_train >= n_samples) {
    throw ValidationError("degenerate split: train size " +
                          std::to_string(n_train) + " of " +
                          std::to_string(n_samples));
  }
  PerturbationPlan plan;
  plan.kind = PlanKind::split;
  plan.n_samples = n_samples;
  plan.base_seed = base_seed;
  plan.fraction = ratio;
  for (std::size_t r = 0; r < repeats; ++r) {
    plan.draws.push_back(
        draw_subset(n_samples, n_train, derive_seed(base_seed, r), true));
  }
  return plan;
}

PerturbationPlan make_splits(const TabularDataset& dataset, double ratio,
                             std::size_t repeats, std::uint64_t base_seed) {
  return make_splits(dataset.n_samples(), ratio, repeats, base_seed);
}

PerturbationPlan make_subsamples(std::size_t n_samples, double fraction,
                                 std::size_t repeats, std::uint64_t base_seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("subsample fraction must lie in (0, 1]");
  }
  check_repeats(repeats);
  const std::size_t keep = rounded_size(n_samples, fraction);
  if (keep == 0) throw ValidationError("degenerate subsample: size 0");
  PerturbationPlan plan;
  plan.kind = PlanKind::subsample;
  plan.n_samples = n_samples;
  plan.base_seed = base_seed;
  plan.fraction = fraction;
  for (std::size_t r = 0; r < repeats; ++r) {
    plan.draws.push_back(
        draw_subset(n_samples, keep, derive_seed(base_seed, r), false));
  }
  return plan;
}

PerturbationPlan make_subsamples(const TabularDataset& dataset, double fraction,
                                 std::size_t repeats, std::uint64_t base_seed) {
  return make_subsamples(dataset.n_samples(), fraction, repeats, base_seed);
}

PerturbationPlan make_noise_plan(std::size_t n_samples, NoiseDistribution dist,
                                 double sigma, std::size_t repeats,
                                 std::uint64_t base_seed) {
  if (sigma < 0.0 || !std::isfinite(sigma)) {
    throw ValidationError("noise scale must be finite and >= 0");
  }
  check_repeats(repeats);
  PerturbationPlan plan;
  plan.kind = PlanKind::noise;
  plan.n_samples = n_samples;
  plan.base_seed = base_seed;
  plan.distribution = dist;
  plan.sigma = sigma;
  std::vector<std::size_t> all(n_samples);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t r = 0; r < repeats; ++r) {
    plan.draws.push_back({derive_seed(base_seed, r), all, {}});
  }
  return plan;
}

std::vector<double> sigma_sweep(double lo, double hi, std::size_t steps) {
  if (lo < 0.0 || hi < lo) {
    throw ValidationError("sigma sweep requires 0 <= lo <= hi");
  }
  if (steps == 0) throw ValidationError("sigma sweep needs at least one step");
  if (steps < 2) {
    if (lo != hi) throw ValidationError("sigma sweep with lo != hi needs >= 2 steps");
    return {lo};
  }
  std::vector<double> out(steps);
  const double width = hi - lo;
  for (std::size_t i = 0; i < steps; ++i) {
    out[i] = lo + width * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  out.back() = hi;
  return out;
}

nlohmann::json PerturbationPlan::to_json() const {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["kind"] = std::string(to_string(kind));
  doc["n_samples"] = n_samples;
  doc["base_seed"] = base_seed;
  if (kind == PlanKind::noise) {
    doc["distribution"] = std::string(to_string(distribution));
    doc["sigma"] = sigma;
  } else {
    doc["fraction"] = fraction;
  }
  auto& reps = doc["repeats"] = nlohmann::json::array();
  for (const auto& d : draws) {
    nlohmann::json r;
    r["seed"] = d.seed;
    if (kind != PlanKind::noise) {
      r["retained"] = d.retained;
      if (kind == PlanKind::split) r["held_out"] = d.held_out;
    }
    reps.push_back(std::move(r));
  }
  return doc;
}

PerturbationPlan PerturbationPlan::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("version").get<int>() != 1) {
      throw ValidationError("unsupported plan version");
    }
    PerturbationPlan plan;
    plan.kind = parse_plan_kind(doc.at("kind").get<std::string>());
    plan.n_samples = doc.at("n_samples").get<std::size_t>();
    plan.base_seed = doc.at("base_seed").get<std::uint64_t>();
    if (plan.kind == PlanKind::noise) {
      plan.distribution = parse_distribution(doc.at("distribution").get<std::string>());
      plan.sigma = doc.at("sigma").get<double>();
    } else {
      plan.fraction = doc.at("fraction").get<double>();
    }
    std::vector<std::size_t> all(plan.n_samples);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (const auto& r : doc.at("repeats")) {
      RepeatDraw d;
      d.seed = r.at("seed").get<std::uint64_t>();
      if (plan.kind == PlanKind::noise) {
        d.retained = all;
      } else {
        d.retained = r.at("retained").get<std::vector<std::size_t>>();
        if (plan.kind == PlanKind::split) {
          d.held_out = r.at("held_out").get<std::vector<std::size_t>>();
        }
      }
      for (std::size_t i : d.retained) {
        if (i >= plan.n_samples) throw ValidationError("plan index out of range");
      }
      for (std::size_t i : d.held_out) {
        if (i >= plan.n_samples) throw ValidationError("plan index out of range");
      }
      plan.draws.push_back(std::move(d));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed plan document: ") + e.what());
  }
}

std::string PerturbationPlan::hash() const {
  return hex64(fnv1a64(to_json().dump()));
}

}  // namespace stabx::perturb
