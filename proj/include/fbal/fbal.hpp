#pragma once

#include "basic.hpp"
#include "error.hpp"
#include "format.hpp"
#include "freealg.hpp"
#include "interval.hpp"
#include "parser.hpp"
#include "random.hpp"
#include "session.hpp"
#include "term.hpp"
#include "wset.hpp"
