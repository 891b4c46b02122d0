// Umbrella header.
#pragma once

#include "pskh/capacity.hpp"
#include "pskh/channel.hpp"
#include "pskh/constellation.hpp"
#include "pskh/core.hpp"
#include "pskh/detectors.hpp"
#include "pskh/generators.hpp"
#include "pskh/isi_model.hpp"
#include "pskh/link.hpp"
#include "pskh/matched_filter.hpp"
#include "pskh/partition.hpp"
#include "pskh/pulse.hpp"
#include "pskh/slerp.hpp"
#include "pskh/spectrum.hpp"
#include "pskh/trellis.hpp"
#include "pskh/waveform.hpp"
#include "pskh/wmf.hpp"
