#pragma once

#include "plar/tabular.hpp"
#include "plar/granule.hpp"
#include "plar/measures.hpp"
#include "plar/parallel.hpp"
#include "plar/engine.hpp"
#include "plar/report.hpp"
#include "plar/generator.hpp"
#include "plar/bench.hpp"
