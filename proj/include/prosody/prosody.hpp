// Umbrella header for the whole library.
#pragma once

#include "prosody/aggregation.hpp"
#include "prosody/audio.hpp"
#include "prosody/classify/forest.hpp"
#include "prosody/classify/gradient_boosting.hpp"
#include "prosody/classify/knn.hpp"
#include "prosody/classify/linear_svm.hpp"
#include "prosody/classify/model_io.hpp"
#include "prosody/classify/network.hpp"
#include "prosody/common.hpp"
#include "prosody/dataset.hpp"
#include "prosody/dsp.hpp"
#include "prosody/evaluation.hpp"
#include "prosody/experiment.hpp"
#include "prosody/feature_cache.hpp"
#include "prosody/features.hpp"
#include "prosody/reports.hpp"
#include "prosody/selection.hpp"
#include "prosody/taxonomy.hpp"
