#pragma once

#include "wmdecomp/analysis.hpp"
#include "wmdecomp/clustering.hpp"
#include "wmdecomp/corpus_model.hpp"
#include "wmdecomp/decomposition.hpp"
#include "wmdecomp/embedding_store.hpp"
#include "wmdecomp/error.hpp"
#include "wmdecomp/ot_solver.hpp"
#include "wmdecomp/pairing.hpp"
#include "wmdecomp/random.hpp"
