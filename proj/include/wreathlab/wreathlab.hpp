#pragma once

#include "bignat.hpp"
#include "conjugacy.hpp"
#include "errors.hpp"
#include "groups.hpp"
#include "magnus.hpp"
#include "parse.hpp"
#include "quotients.hpp"
#include "separability.hpp"
#include "wreath.hpp"
