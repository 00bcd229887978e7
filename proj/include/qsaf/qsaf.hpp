#pragma once

#include "qsaf/encodings.hpp"
#include "qsaf/experiments.hpp"
#include "qsaf/flow.hpp"
#include "qsaf/graph.hpp"
#include "qsaf/hermitian.hpp"
#include "qsaf/io.hpp"
#include "qsaf/manifold.hpp"
#include "qsaf/random.hpp"
#include "qsaf/simplex.hpp"
