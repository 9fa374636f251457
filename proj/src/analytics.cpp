#include "cmd/analytics.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <set>

namespace cmd {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::vector<SequenceRecord> parse_fasta(std::istream& in) {
    std::vector<SequenceRecord> seqs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '>') {
            std::string id = line.substr(1);
            const auto ws = id.find_first_of(" \t");
            if (ws != std::string::npos)
                id.resize(ws); // drop description, keep the id token
            if (id.empty())
                throw ParseError("sequence header with no id");
            seqs.push_back({std::move(id), ""});
        } else {
            if (seqs.empty())
                throw ParseError("sequence data before any '>' header");
            seqs.back().bases += line;
        }
    }
    std::set<std::string_view> ids;
    for (const auto& s : seqs)
        if (!ids.insert(s.id).second)
            throw DuplicateRowId("sequence id '" + s.id + "' appears twice");
    return seqs;
}

AssociativeArray kmerize(const std::vector<SequenceRecord>& seqs, std::size_t k) {
    if (k < 1)
        throw InvalidValue("window length must be at least 1");
    std::vector<Triple> triples;
    std::vector<std::string_view> windows;
    for (const auto& s : seqs) {
        if (s.bases.size() < k)
            throw SequenceTooShort("sequence '" + s.id + "' is shorter than " +
                                   std::to_string(k));
        windows.clear();
        for (std::size_t i = 0; i + k <= s.bases.size(); ++i)
            windows.emplace_back(s.bases.data() + i, k);
        std::sort(windows.begin(), windows.end());
        windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
        for (auto w : windows)
            triples.push_back({s.id, std::string(w), Value::num(1.0)});
    }
    return AssociativeArray::from_triples(std::move(triples), CollisionRule::LastWins);
}

MatchResult dna_match(const AssociativeArray& A, double cut) {
    return {threshold(multiply(A, transpose(A)), cut), cut};
}

MaskedMatch masked_dna_match(const std::vector<SequenceRecord>& seqs, std::size_t k,
                             double cut, const crypto::MaskPolicy& policy,
                             const crypto::MaskKeySet& keys) {
    if (policy.values != crypto::Scheme::Clear)
        throw PolicyMismatch("match counts must stay CLEAR to add under multiply");
    const AssociativeArray A = kmerize(seqs, k);

    MaskedMatch out;
    out.plain = dna_match(A, cut);

    auto t0 = std::chrono::steady_clock::now();
    const crypto::MaskedArray Am = crypto::mask_array(A, policy, keys);
    out.mask_seconds = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    out.masked = {threshold(multiply(Am.payload, transpose(Am.payload)), cut), cut};
    out.compute_seconds = seconds_since(t0);

    // Both axes of the match matrix carry sequence ids, i.e. A's rows.
    const crypto::MaskPolicy match_policy{policy.rows, policy.rows, crypto::Scheme::Clear};
    t0 = std::chrono::steady_clock::now();
    out.unmasked =
        crypto::unmask_array({out.masked.X, match_policy, keys.kdf_salt}, keys);
    out.unmask_seconds = seconds_since(t0);
    return out;
}

AssociativeArray log_graph(const AssociativeArray& E, std::string_view prefix_a,
                           std::string_view prefix_b) {
    auto project = [&E](std::string_view prefix) {
        const auto& cols = E.col_keys();
        const auto hit = std::any_of(cols.begin(), cols.end(), [&](const std::string& c) {
            return std::string_view(c).substr(0, prefix.size()) == prefix;
        });
        if (!hit)
            throw EmptyProjection("no column starts with '" + std::string(prefix) + "'");
        return select(E, KeySpec::all(), KeySpec::prefix(std::string(prefix)));
    };
    const AssociativeArray a = project(prefix_a);
    const AssociativeArray b = project(prefix_b);
    return multiply(transpose(a), b);
}

} // namespace cmd
