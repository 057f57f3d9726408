#ifndef RODLAB_RODLAB_HPP
#define RODLAB_RODLAB_HPP

#include "rodlab/curve.hpp"
#include "rodlab/energy.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/exact.hpp"
#include "rodlab/extrusion.hpp"
#include "rodlab/fixtures.hpp"
#include "rodlab/gamma.hpp"
#include "rodlab/geometry.hpp"
#include "rodlab/injectify.hpp"
#include "rodlab/io.hpp"
#include "rodlab/relaxation.hpp"
#include "rodlab/rng.hpp"
#include "rodlab/vec2.hpp"

#endif  // RODLAB_RODLAB_HPP
