#pragma once

#include "cprob/abelian.hpp"
#include "cprob/bilinear.hpp"
#include "cprob/commuting.hpp"
#include "cprob/egyptian.hpp"
#include "cprob/errors.hpp"
#include "cprob/group.hpp"
#include "cprob/rational.hpp"
#include "cprob/spectrum.hpp"
