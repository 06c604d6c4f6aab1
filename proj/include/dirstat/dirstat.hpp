#pragma once

#include "dirstat/distributions.hpp"
#include "dirstat/error.hpp"
#include "dirstat/estimation.hpp"
#include "dirstat/eval.hpp"
#include "dirstat/io.hpp"
#include "dirstat/linalg.hpp"
#include "dirstat/mixture.hpp"
#include "dirstat/parallel.hpp"
#include "dirstat/partitional.hpp"
#include "dirstat/random.hpp"
#include "dirstat/specfun.hpp"
#include "dirstat/types.hpp"
