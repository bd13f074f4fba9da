#pragma once
// Convenience umbrella for the whole library.

#include "stftpr/core.hpp"
#include "stftpr/stft.hpp"
#include "stftpr/direct.hpp"
#include "stftpr/altproj.hpp"
#include "stftpr/gespar.hpp"
#include "stftpr/harness.hpp"
#include "stftpr/io.hpp"
