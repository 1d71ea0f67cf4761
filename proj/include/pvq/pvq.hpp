#pragma once

// Grayscale vector-quantization codec: LBG codebook training with random
// or pyramid-seeded initialization, block codec, and benchmark harness.

#include "pvq/bench.hpp"
#include "pvq/codec.hpp"
#include "pvq/error.hpp"
#include "pvq/image.hpp"
#include "pvq/metrics.hpp"
#include "pvq/pyramid.hpp"
#include "pvq/vq.hpp"
