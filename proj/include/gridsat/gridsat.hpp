#pragma once

#include "gridsat/cnf.hpp"
#include "gridsat/compat_matrix.hpp"
#include "gridsat/depletion.hpp"
#include "gridsat/oracle.hpp"
#include "gridsat/extraction.hpp"
#include "gridsat/audit.hpp"
