#include "jlsh/random.hpp"

#include <boost/random/normal_distribution.hpp>

namespace jlsh {

struct Rng::NormalState {
  boost::random::normal_distribution<double> dist{0.0, 1.0};
};

Rng::Rng(Seed seed, std::uint64_t stream)
    : engine_(derive_seed(seed, stream).value),
      normal_(std::make_unique<NormalState>()) {}

Rng::~Rng() = default;
Rng::Rng(Rng&&) noexcept = default;
Rng& Rng::operator=(Rng&&) noexcept = default;

double Rng::normal() { return normal_->dist(engine_); }

void Rng::fill_normal(std::span<double> out) {
  auto& dist = normal_->dist;
  for (double& v : out) v = dist(engine_);
}

}  // namespace jlsh
