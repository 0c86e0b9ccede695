#include "absa/gradcheck.hpp"

#include "absa/random.hpp"

namespace absa {

GradientProblem toy_gradient_problem(Task task, std::uint64_t seed,
                                     nn::Pooling pooling,
                                     nn::AspectInput aspect_input) {
  constexpr int kVocab = 20;
  constexpr int kLength = 10;
  nn::Architecture arch;
  arch.vocab_size = kVocab;
  arch.embedding_dim = 8;
  arch.filters = 4;
  arch.pooling = pooling;
  if (task == Task::aspect) {
    arch.classes = 5;
    arch.widths = {3, 4, 5};
    arch.aspect_input = nn::AspectInput::none;
  } else {
    arch.classes = 3;
    arch.widths = {4, 5, 6};
    arch.aspect_input = aspect_input;
    arch.aspect_vocab_size = 6;
    arch.aspect_dim = 8;
  }

  GradientProblem p;
  p.params = nn::init_params(arch, seed, 0.5);
  Rng rng(derive_seed(seed, 100));
  for (auto& bank : p.params.banks)
    for (Eigen::Index j = 0; j < bank.bias.size(); ++j) bank.bias[j] = rng.uniform(-0.1, 0.1);
  for (Eigen::Index j = 0; j < p.params.output_bias.size(); ++j)
    p.params.output_bias[j] = rng.uniform(-0.1, 0.1);

  // Seven real tokens followed by padding.
  p.example.sentence.indices.assign(kLength, kPad);
  p.example.sentence.true_length = 7;
  for (int i = 0; i < 7; ++i)
    p.example.sentence.indices[i] = 1 + static_cast<int>(rng.below(kVocab - 1));

  p.target = Vector::Zero(arch.classes);
  if (task == Task::aspect) {
    p.target[1] = 0.5;
    p.target[3] = 0.5;
  } else {
    const int aspect_rows = aspect_input == nn::AspectInput::shared ? kVocab : 6;
    p.example.aspect_tokens = {2 + static_cast<int>(rng.below(aspect_rows - 2)),
                               2 + static_cast<int>(rng.below(aspect_rows - 2))};
    p.target[2] = 1.0;
  }
  return p;
}

}  // namespace absa
