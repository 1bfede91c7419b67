#pragma once

#include "lfepi/blur.hpp"
#include "lfepi/cnn.hpp"
#include "lfepi/deblur.hpp"
#include "lfepi/depth_render.hpp"
#include "lfepi/epi.hpp"
#include "lfepi/fft.hpp"
#include "lfepi/interp.hpp"
#include "lfepi/kernel_select.hpp"
#include "lfepi/lf_io.hpp"
#include "lfepi/light_field.hpp"
#include "lfepi/metrics.hpp"
#include "lfepi/netpbm.hpp"
#include "lfepi/parallel.hpp"
#include "lfepi/pipeline.hpp"
#include "lfepi/spectrum.hpp"
#include "lfepi/synth.hpp"
#include "lfepi/training.hpp"
#include "lfepi/weights_io.hpp"
