#pragma once

#include "quadinv/datagen.hpp"
#include "quadinv/densela.hpp"
#include "quadinv/error.hpp"
#include "quadinv/inverse.hpp"
#include "quadinv/io.hpp"
#include "quadinv/model.hpp"
#include "quadinv/qp.hpp"
