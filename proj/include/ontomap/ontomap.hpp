#pragma once

#include "ontomap/corpus.hpp"
#include "ontomap/decode.hpp"
#include "ontomap/edit_translator.hpp"
#include "ontomap/error.hpp"
#include "ontomap/eval.hpp"
#include "ontomap/matcher.hpp"
#include "ontomap/ontology.hpp"
#include "ontomap/provenance.hpp"
#include "ontomap/smartid.hpp"
#include "ontomap/text.hpp"
#include "ontomap/translator.hpp"
#include "ontomap/wire.hpp"
