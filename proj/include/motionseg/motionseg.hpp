// Umbrella header. The HTTP client is separate (motionseg/http_chat_client.hpp)
// because it pulls in cpp-httplib.
#pragma once

#include "motionseg/config.hpp"
#include "motionseg/error.hpp"
#include "motionseg/eval.hpp"
#include "motionseg/io.hpp"
#include "motionseg/kinematics.hpp"
#include "motionseg/llm_harness.hpp"
#include "motionseg/primitives.hpp"
#include "motionseg/resample.hpp"
#include "motionseg/segmenter.hpp"
#include "motionseg/synthgen.hpp"
#include "motionseg/table2.hpp"
