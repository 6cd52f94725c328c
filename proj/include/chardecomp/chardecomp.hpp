#pragma once

// Umbrella header.

#include "chardecomp/adam.hpp"
#include "chardecomp/attribution/candidates.hpp"
#include "chardecomp/attribution/interaction.hpp"
#include "chardecomp/attribution/patterns.hpp"
#include "chardecomp/attribution/ranking.hpp"
#include "chardecomp/attribution/segeval.hpp"
#include "chardecomp/attribution/synthetic_experiment.hpp"
#include "chardecomp/autodiff.hpp"
#include "chardecomp/cd/cnn.hpp"
#include "chardecomp/cd/contribution.hpp"
#include "chardecomp/cd/linearize.hpp"
#include "chardecomp/cd/lstm.hpp"
#include "chardecomp/corpus/conllu.hpp"
#include "chardecomp/corpus/schema.hpp"
#include "chardecomp/corpus/segmentation.hpp"
#include "chardecomp/corpus/synthetic.hpp"
#include "chardecomp/corpus/toy_corpus.hpp"
#include "chardecomp/corpus/vocab.hpp"
#include "chardecomp/corpus/word.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/evaluate.hpp"
#include "chardecomp/models/forward.hpp"
#include "chardecomp/models/graph.hpp"
#include "chardecomp/models/model.hpp"
#include "chardecomp/models/model_io.hpp"
#include "chardecomp/models/train.hpp"
#include "chardecomp/report/heatmap.hpp"
#include "chardecomp/report/manifest.hpp"
#include "chardecomp/report/records.hpp"
#include "chardecomp/stats/kruskal.hpp"
#include "chardecomp/tensor.hpp"
#include "chardecomp/utf8.hpp"
#include "chardecomp/version.hpp"
