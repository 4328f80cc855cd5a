#pragma once

#include "cssc/admm.hpp"
#include "cssc/affinity.hpp"
#include "cssc/constraints.hpp"
#include "cssc/data_matrix.hpp"
#include "cssc/grid_search.hpp"
#include "cssc/hungarian.hpp"
#include "cssc/kmeans.hpp"
#include "cssc/labels.hpp"
#include "cssc/lsr.hpp"
#include "cssc/matrix_io.hpp"
#include "cssc/metrics.hpp"
#include "cssc/pipelines.hpp"
#include "cssc/prng.hpp"
#include "cssc/spectral_embedding.hpp"
#include "cssc/synthetic.hpp"
