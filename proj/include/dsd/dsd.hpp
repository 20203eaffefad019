#pragma once

// Umbrella header; the networked pieces (http_provider.hpp, llm_client.hpp)
// are intentionally separate because they pull in the HTTP stack.

#include "dsd/baselines.hpp"
#include "dsd/corpus.hpp"
#include "dsd/downstream.hpp"
#include "dsd/embed_dsd.hpp"
#include "dsd/embedding.hpp"
#include "dsd/errors.hpp"
#include "dsd/eval.hpp"
#include "dsd/explainers.hpp"
#include "dsd/llm.hpp"
#include "dsd/provider.hpp"
#include "dsd/records.hpp"
#include "dsd/render.hpp"
#include "dsd/rng.hpp"
#include "dsd/span.hpp"
#include "dsd/text.hpp"
