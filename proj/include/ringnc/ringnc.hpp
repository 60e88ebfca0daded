#pragma once

#include "ringnc/errors.hpp"
#include "ringnc/curves.hpp"
#include "ringnc/linalg.hpp"
#include "ringnc/model.hpp"
#include "ringnc/pmoo.hpp"
#include "ringnc/pmoo_oracle.hpp"
#include "ringnc/baselines.hpp"
#include "ringnc/report.hpp"
#include "ringnc/network_io.hpp"
#include "ringnc/scenario.hpp"
