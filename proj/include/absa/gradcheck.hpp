#pragma once

#include <cstdint>

#include "absa/config.hpp"
#include "absa/nn.hpp"

namespace absa {

struct GradientProblem {
  nn::ModelParams params;
  nn::Example example;
  Vector target;
};

// Toy-sized instance of either architecture (n=10, k=8, 4 filters per
// width; 5 aspect classes with a two-aspect target, or 3 polarity classes
// with a one-hot target). Biases are randomized so that both sides of each
// ReLU are exercised.
GradientProblem toy_gradient_problem(Task task, std::uint64_t seed,
                                     nn::Pooling pooling = nn::Pooling::max,
                                     nn::AspectInput aspect_input =
                                         nn::AspectInput::separate);

}  // namespace absa
