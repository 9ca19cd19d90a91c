#pragma once

#include "sublis/core.hpp"
#include "sublis/engine.hpp"
#include "sublis/genlis.hpp"
#include "sublis/genlis_instance.hpp"
#include "sublis/instances.hpp"
#include "sublis/io.hpp"
#include "sublis/oracle.hpp"
#include "sublis/ptree.hpp"
#include "sublis/reslis.hpp"
#include "sublis/rng.hpp"
