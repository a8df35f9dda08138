#pragma once

#include "emoclass/baselines.hpp"
#include "emoclass/datasets.hpp"
#include "emoclass/embeddings.hpp"
#include "emoclass/error.hpp"
#include "emoclass/head.hpp"
#include "emoclass/head_io.hpp"
#include "emoclass/matrix.hpp"
#include "emoclass/metrics.hpp"
