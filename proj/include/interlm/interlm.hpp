#ifndef INTERLM_INTERLM_HPP
#define INTERLM_INTERLM_HPP

#include "interlm/csv.hpp"
#include "interlm/design.hpp"
#include "interlm/error.hpp"
#include "interlm/formula.hpp"
#include "interlm/ols.hpp"
#include "interlm/parallel.hpp"
#include "interlm/report.hpp"
#include "interlm/search.hpp"
#include "interlm/synthgen.hpp"
#include "interlm/t_dist.hpp"
#include "interlm/table.hpp"
#include "interlm/term.hpp"

#endif  // INTERLM_INTERLM_HPP
