#pragma once
// Convenience include for the whole library.

#include "baglogic/config.hpp"
#include "baglogic/core.hpp"
#include "baglogic/cp_abduce.hpp"
#include "baglogic/datagen.hpp"
#include "baglogic/eval.hpp"
#include "baglogic/examples.hpp"
#include "baglogic/factfile.hpp"
#include "baglogic/operators.hpp"
#include "baglogic/scene.hpp"
#include "baglogic/tp_infer.hpp"
