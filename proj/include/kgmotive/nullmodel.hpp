#pragma once

// Edge-list (EL) approximation of the degree-sequence configuration model,
// plus the two regimes for encoding the degree sequence itself: the cheating
// empirical lower bound (used by the null competitor) and the fair
// Pitman-Yor code (used inside the motif code).

#include "kgmotive/codes.hpp"
#include "kgmotive/graph.hpp"
#include "kgmotive/types.hpp"

namespace kgmotive::nullmodel {

using codes::PitmanYorConfig;
using graph::DegreeSequence;
using graph::KnowledgeGraph;

// 2*log2(m!) - sum log2(d_in!) - sum log2(d_rel!) - sum log2(d_out!).
Bits el_structure_bits(const DegreeSequence& d);

// Empirical-distribution (maximum-likelihood) codelength of the three degree
// sequences with zero model cost: -sum_i log2(count(x_i)/len), per sequence.
Bits degree_bits_lowerbound(const DegreeSequence& d);

// Honest alternative: each sequence under the Pitman-Yor code.
Bits degree_bits_fair(const DegreeSequence& d, PitmanYorConfig cfg = {});

// The null competitor L^null(G): v and r headers, cheating degree encoding,
// EL structure bits.
Bits null_bits(const KnowledgeGraph& g);

} // namespace kgmotive::nullmodel
