#pragma once

#include "gpt2d/conformal.hpp"
#include "gpt2d/forward.hpp"
#include "gpt2d/geometry.hpp"
#include "gpt2d/inversion.hpp"
#include "gpt2d/io.hpp"
#include "gpt2d/random_map.hpp"
#include "gpt2d/svg.hpp"
#include "gpt2d/types.hpp"
