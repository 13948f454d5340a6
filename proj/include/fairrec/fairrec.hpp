#ifndef FAIRREC_FAIRREC_HPP
#define FAIRREC_FAIRREC_HPP

#include "fairrec/bounds.hpp"
#include "fairrec/error.hpp"
#include "fairrec/expansion.hpp"
#include "fairrec/experiments.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/io.hpp"
#include "fairrec/model.hpp"
#include "fairrec/random.hpp"
#include "fairrec/solver.hpp"
#include "fairrec/spectral.hpp"

#endif  // FAIRREC_FAIRREC_HPP
