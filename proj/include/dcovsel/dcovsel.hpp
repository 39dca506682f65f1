#pragma once

#include "dcovsel/csv.hpp"
#include "dcovsel/data_matrix.hpp"
#include "dcovsel/dcov.hpp"
#include "dcovsel/diverse.hpp"
#include "dcovsel/error.hpp"
#include "dcovsel/linkage.hpp"
#include "dcovsel/oracle.hpp"
#include "dcovsel/parallel.hpp"
#include "dcovsel/pipeline.hpp"
#include "dcovsel/relevant.hpp"
