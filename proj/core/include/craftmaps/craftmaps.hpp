#pragma once

#include "craftmaps/craftmap.hpp"
#include "craftmaps/data.hpp"
#include "craftmaps/error.hpp"
#include "craftmaps/eval.hpp"
#include "craftmaps/hadamard.hpp"
#include "craftmaps/kernel.hpp"
#include "craftmaps/learner.hpp"
#include "craftmaps/model_io.hpp"
#include "craftmaps/random.hpp"
#include "craftmaps/rfm.hpp"
#include "craftmaps/types.hpp"
#include "craftmaps/version.hpp"
