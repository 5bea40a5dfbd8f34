#pragma once

#include <codd/error.hpp>
#include <codd/model.hpp>
#include <codd/pooling.hpp>
#include <codd/plan.hpp>
#include <codd/planner.hpp>
#include <codd/allocation.hpp>
#include <codd/formation.hpp>
#include <codd/io.hpp>
#include <codd/report.hpp>
