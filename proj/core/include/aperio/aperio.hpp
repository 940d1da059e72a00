#pragma once

#include "aperio/boundary.hpp"
#include "aperio/cuntz_pimsner.hpp"
#include "aperio/delone.hpp"
#include "aperio/error.hpp"
#include "aperio/geometry.hpp"
#include "aperio/groupoid.hpp"
#include "aperio/hamiltonians.hpp"
#include "aperio/invariants.hpp"
#include "aperio/io.hpp"
#include "aperio/kasparov.hpp"
#include "aperio/linalg.hpp"
#include "aperio/operator.hpp"
#include "aperio/pattern_tree.hpp"
#include "aperio/random.hpp"
