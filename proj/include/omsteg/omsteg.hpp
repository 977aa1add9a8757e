#pragma once

#include "omsteg/basis.hpp"
#include "omsteg/chaos.hpp"
#include "omsteg/codec.hpp"
#include "omsteg/imageio.hpp"
#include "omsteg/keyschedule.hpp"
#include "omsteg/mat8.hpp"
#include "omsteg/metrics.hpp"
#include "omsteg/transform.hpp"
