#pragma once

#include "hoi/errors.hpp"
#include "hoi/gaussian_oracle.hpp"
#include "hoi/interactions.hpp"
#include "hoi/io.hpp"
#include "hoi/kernel_entropy.hpp"
#include "hoi/parallel.hpp"
#include "hoi/recording.hpp"
#include "hoi/batch.hpp"
