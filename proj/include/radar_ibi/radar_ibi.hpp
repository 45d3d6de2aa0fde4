#pragma once

#include "radar_ibi/config.hpp"
#include "radar_ibi/cube_io.hpp"
#include "radar_ibi/displacement.hpp"
#include "radar_ibi/errors.hpp"
#include "radar_ibi/evaluation.hpp"
#include "radar_ibi/fft.hpp"
#include "radar_ibi/filter.hpp"
#include "radar_ibi/formats.hpp"
#include "radar_ibi/imaging.hpp"
#include "radar_ibi/pipeline.hpp"
#include "radar_ibi/radar_cube.hpp"
#include "radar_ibi/scene_sim.hpp"
#include "radar_ibi/spectral.hpp"
#include "radar_ibi/svg_plot.hpp"
#include "radar_ibi/topology.hpp"
#include "radar_ibi/trace.hpp"
