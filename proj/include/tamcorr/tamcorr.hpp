#pragma once

// Everything except the HTTP service (review_service.hpp), which pulls in
// cpp-httplib.

#include "tamcorr/benchmark.hpp"
#include "tamcorr/corpus.hpp"
#include "tamcorr/correction.hpp"
#include "tamcorr/dataset.hpp"
#include "tamcorr/decision_list.hpp"
#include "tamcorr/evaluation.hpp"
#include "tamcorr/features.hpp"
#include "tamcorr/maxent.hpp"
#include "tamcorr/random.hpp"
#include "tamcorr/review.hpp"
#include "tamcorr/synthetic.hpp"
#include "tamcorr/taxonomy.hpp"
#include "tamcorr/text.hpp"
