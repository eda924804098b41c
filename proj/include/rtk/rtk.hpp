#pragma once

#include "rtk/config.hpp"
#include "rtk/errors.hpp"
#include "rtk/experiment.hpp"
#include "rtk/fft.hpp"
#include "rtk/filter.hpp"
#include "rtk/forward.hpp"
#include "rtk/image.hpp"
#include "rtk/io.hpp"
#include "rtk/operator.hpp"
#include "rtk/phantom.hpp"
#include "rtk/random.hpp"
#include "rtk/regularization.hpp"
#include "rtk/sinogram.hpp"
#include "rtk/solver.hpp"
