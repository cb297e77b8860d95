#pragma once

#include "eah/adaptive_code.hpp"
#include "eah/baseline.hpp"
#include "eah/bench.hpp"
#include "eah/bits.hpp"
#include "eah/compressor.hpp"
#include "eah/container.hpp"
#include "eah/eahn_codec.hpp"
#include "eah/entropy_analysis.hpp"
#include "eah/error.hpp"
#include "eah/huffman.hpp"
#include "eah/online_codec.hpp"
#include "eah/parallel_encoder.hpp"
