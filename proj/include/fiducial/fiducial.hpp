#pragma once

#include "fiducial/catalog.hpp"
#include "fiducial/compat.hpp"
#include "fiducial/dataset.hpp"
#include "fiducial/diagnostics.hpp"
#include "fiducial/errors.hpp"
#include "fiducial/fiducial_core.hpp"
#include "fiducial/gibbs.hpp"
#include "fiducial/io.hpp"
#include "fiducial/model.hpp"
#include "fiducial/randvar.hpp"
#include "fiducial/sample_matrix.hpp"
#include "fiducial/specfun.hpp"
