#pragma once

#include <array>
#include <cstdint>

#include "hyperseg/sampler.hpp"
#include "hyperseg/tensor.hpp"
#include "hyperseg/volume.hpp"

namespace hyperseg::pipeline {

// Copy of the volume shifted and scaled to zero mean, unit variance; a
// constant volume maps to all zeros.
Volume standardize(const Volume& vol);

// Cubic subvolume as a (1, e, e, e) tensor; the patch must lie inside the
// volume (training-time sampling guarantees this). Throws ShapeError.
nn::Tensor patch_to_tensor(const Volume& vol, const sampler::PatchSpec& spec);

// Same extraction with reflection padding at the borders, for inference
// patches centered near the volume edge. edge may exceed the volume dims.
nn::Tensor patch_to_tensor_reflect(const Volume& vol,
                                   std::array<std::int64_t, 3> center,
                                   std::int64_t edge);

// (1, e, e, e) -> (1, m, m, m) trilinear resample (align-corners); identity
// copy when e == m.
nn::Tensor resize_patch(const nn::Tensor& patch, std::int64_t m);

}  // namespace hyperseg::pipeline
