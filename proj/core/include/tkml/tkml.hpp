#pragma once

#include "tkml/attacks.hpp"
#include "tkml/dataset.hpp"
#include "tkml/errors.hpp"
#include "tkml/evaluation.hpp"
#include "tkml/label_set.hpp"
#include "tkml/predictor.hpp"
#include "tkml/topk_math.hpp"
