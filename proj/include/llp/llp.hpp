#pragma once

#include "llp/alphabet.hpp"
#include "llp/atc.hpp"
#include "llp/automaton.hpp"
#include "llp/automaton_io.hpp"
#include "llp/bounds.hpp"
#include "llp/error.hpp"
#include "llp/lang_ops.hpp"
#include "llp/lookahead.hpp"
#include "llp/plant.hpp"
#include "llp/recognizer.hpp"
#include "llp/session.hpp"
#include "llp/synthesis.hpp"
#include "llp/vlp.hpp"
