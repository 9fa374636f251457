// Reference analytics over associative arrays: k-mer sequence matching
// and bipartite co-occurrence graphs from exploded logs. Both run the
// same way on plaintext and masked arrays.
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cmd/assoc_array.hpp"
#include "cmd/crypto/mask.hpp"

namespace cmd {

struct SequenceRecord {
    std::string id;    // unique
    std::string bases; // A/C/G/T text
    bool operator==(const SequenceRecord&) const = default;
};

// FASTA-like: '>' header holds the id, following lines the bases.
std::vector<SequenceRecord> parse_fasta(std::istream& in);

// One entry (id, kmer) = 1 per distinct length-k window of each sequence.
AssociativeArray kmerize(const std::vector<SequenceRecord>& seqs, std::size_t k);

struct MatchResult {
    AssociativeArray X; // sequence id x sequence id shared-k-mer counts
    double cut = 0.0;
};

// X = threshold(A * A^T, cut).
MatchResult dna_match(const AssociativeArray& A, double cut);

struct MaskedMatch {
    MatchResult masked;        // ciphertext-keyed result
    MatchResult plain;         // plaintext pipeline on the same corpus
    AssociativeArray unmasked; // masked.X unmasked; should equal plain.X
    double mask_seconds = 0, compute_seconds = 0, unmask_seconds = 0;
};

// Runs the full mask -> match -> unmask pipeline next to the plaintext
// one, timing each leg separately. Values must stay CLEAR: the match
// counts have to add in plaintext space.
MaskedMatch masked_dna_match(const std::vector<SequenceRecord>& seqs, std::size_t k,
                             double cut, const crypto::MaskPolicy& policy,
                             const crypto::MaskKeySet& keys);

// Co-occurrence graph between two exploded-column families:
// multiply(transpose(select(E, All, prefix_a)), select(E, All, prefix_b)).
// Entry (a, b) counts log records carrying both values.
AssociativeArray log_graph(const AssociativeArray& E, std::string_view prefix_a,
                           std::string_view prefix_b);

} // namespace cmd
