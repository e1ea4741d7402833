#pragma once

#include "hres/criteria.hpp"
#include "hres/csv.hpp"
#include "hres/demand.hpp"
#include "hres/dispatch.hpp"
#include "hres/error.hpp"
#include "hres/mcdm.hpp"
#include "hres/pipeline.hpp"
#include "hres/predesign.hpp"
#include "hres/report.hpp"
#include "hres/resources.hpp"
#include "hres/scenario.hpp"
#include "hres/verify.hpp"
#include "hres/version.hpp"
