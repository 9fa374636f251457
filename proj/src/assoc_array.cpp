#include "cmd/assoc_array.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include <omp.h>

namespace cmd {

namespace {

constexpr std::uint32_t kNoMatch = std::numeric_limits<std::uint32_t>::max();

bool is_zero(const Value& v) { return v.is_num() && v.num_value() == 0.0; }

// Sorted unique key vector from an arbitrary key sequence.
std::vector<std::string> sorted_unique(std::vector<std::string> keys) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

std::uint32_t index_of(const std::vector<std::string>& keys, std::string_view k) {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    return static_cast<std::uint32_t>(it - keys.begin());
}

// Merges two sorted unique key vectors; fills per-input maps into the
// merged vector.
std::vector<std::string> merge_keys(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b,
                                    std::vector<std::uint32_t>& amap,
                                    std::vector<std::uint32_t>& bmap) {
    std::vector<std::string> merged;
    merged.reserve(a.size() + b.size());
    amap.resize(a.size());
    bmap.resize(b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        int cmp;
        if (i == a.size())
            cmp = 1;
        else if (j == b.size())
            cmp = -1;
        else
            cmp = a[i].compare(b[j]) < 0 ? -1 : (a[i] == b[j] ? 0 : 1);
        if (cmp <= 0)
            amap[i++] = static_cast<std::uint32_t>(merged.size());
        if (cmp >= 0)
            bmap[j++] = static_cast<std::uint32_t>(merged.size());
        merged.push_back(cmp <= 0 ? a[i - 1] : b[j - 1]);
    }
    return merged;
}

} // namespace

// ---------------------------------------------------------------- KeySpec

KeySpec KeySpec::exact(std::vector<std::string> keys) {
    KeySpec s(Kind::Exact);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    s.keys_ = std::move(keys);
    return s;
}

KeySpec KeySpec::prefix(std::string p) {
    KeySpec s(Kind::Prefix);
    s.lo_ = std::move(p);
    return s;
}

KeySpec KeySpec::range(std::string lo, std::string hi) {
    if (lo > hi)
        throw InvalidRange("range start '" + lo + "' exceeds end '" + hi + "'");
    KeySpec s(Kind::Range);
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
}

bool KeySpec::matches(std::string_view key) const {
    switch (kind_) {
    case Kind::All:
        return true;
    case Kind::Exact:
        return std::binary_search(keys_.begin(), keys_.end(), key);
    case Kind::Prefix:
        return key.substr(0, lo_.size()) == lo_;
    case Kind::Range:
        return key >= lo_ && key <= hi_;
    }
    return false;
}

// ------------------------------------------------------- construction

AssociativeArray AssociativeArray::from_indexed(std::vector<std::string> rows,
                                                std::vector<std::string> cols,
                                                std::vector<std::uint32_t> entry_rows,
                                                std::vector<std::uint32_t> entry_cols,
                                                std::vector<Value> entry_vals) {
    const std::size_t n = entry_vals.size();
    std::vector<std::uint32_t> row_used(rows.size(), kNoMatch);
    std::vector<std::uint32_t> col_used(cols.size(), kNoMatch);
    std::size_t kept = 0;
    for (std::size_t e = 0; e < n; ++e) {
        if (is_zero(entry_vals[e]))
            continue;
        entry_rows[kept] = entry_rows[e];
        entry_cols[kept] = entry_cols[e];
        if (kept != e)
            entry_vals[kept] = std::move(entry_vals[e]);
        row_used[entry_rows[kept]] = 0;
        col_used[entry_cols[kept]] = 0;
        ++kept;
    }

    AssociativeArray out;
    std::uint32_t nr = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (row_used[i] != kNoMatch) {
            row_used[i] = nr++;
            out.rows_.push_back(std::move(rows[i]));
        }
    std::uint32_t nc = 0;
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (col_used[i] != kNoMatch) {
            col_used[i] = nc++;
            out.cols_.push_back(std::move(cols[i]));
        }

    out.row_ptr_.assign(nr + 1, 0);
    out.col_idx_.resize(kept);
    out.vals_.reserve(kept);
    for (std::size_t e = 0; e < kept; ++e) {
        out.row_ptr_[row_used[entry_rows[e]] + 1]++;
        out.col_idx_[e] = col_used[entry_cols[e]];
        out.vals_.push_back(std::move(entry_vals[e]));
    }
    std::partial_sum(out.row_ptr_.begin(), out.row_ptr_.end(), out.row_ptr_.begin());
    return out;
}

AssociativeArray AssociativeArray::from_triples(std::vector<Triple> triples,
                                                CollisionRule rule) {
    std::vector<std::string> rows, cols;
    rows.reserve(triples.size());
    cols.reserve(triples.size());
    for (const auto& t : triples) {
        if (t.row.empty() || t.col.empty())
            throw InvalidValue("triple keys must be non-empty");
        rows.push_back(t.row);
        cols.push_back(t.col);
    }
    rows = sorted_unique(std::move(rows));
    cols = sorted_unique(std::move(cols));

    struct Slot {
        std::uint32_t r, c, pos;
    };
    std::vector<Slot> slots(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i)
        slots[i] = {index_of(rows, triples[i].row), index_of(cols, triples[i].col),
                    static_cast<std::uint32_t>(i)};
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
        return std::tie(a.r, a.c, a.pos) < std::tie(b.r, b.c, b.pos);
    });

    std::vector<std::uint32_t> er, ec;
    std::vector<Value> ev;
    er.reserve(slots.size());
    ec.reserve(slots.size());
    ev.reserve(slots.size());
    std::size_t i = 0;
    while (i < slots.size()) {
        std::size_t j = i + 1;
        Value acc = std::move(triples[slots[i].pos].val);
        while (j < slots.size() && slots[j].r == slots[i].r && slots[j].c == slots[i].c) {
            const Value& next = triples[slots[j].pos].val;
            if (acc.is_num() != next.is_num())
                throw MixedTypeCollision("duplicate key pair mixes numeric and string values");
            if (rule == CollisionRule::Sum && acc.is_num())
                acc = Value::num(acc.num_value() + next.num_value());
            else
                acc = next;
            ++j;
        }
        er.push_back(slots[i].r);
        ec.push_back(slots[i].c);
        ev.push_back(std::move(acc));
        i = j;
    }
    return from_indexed(std::move(rows), std::move(cols), std::move(er), std::move(ec),
                        std::move(ev));
}

std::vector<Triple> AssociativeArray::to_triples() const {
    std::vector<Triple> out;
    out.reserve(nnz());
    for (std::size_t i = 0; i < rows_.size(); ++i)
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e)
            out.push_back({rows_[i], cols_[col_idx_[e]], vals_[e]});
    return out;
}

std::optional<Value> AssociativeArray::at(std::string_view row, std::string_view col) const {
    auto rit = std::lower_bound(rows_.begin(), rows_.end(), row);
    if (rit == rows_.end() || *rit != row)
        return std::nullopt;
    auto cit = std::lower_bound(cols_.begin(), cols_.end(), col);
    if (cit == cols_.end() || *cit != col)
        return std::nullopt;
    const auto ri = static_cast<std::size_t>(rit - rows_.begin());
    const auto ci = static_cast<std::uint32_t>(cit - cols_.begin());
    auto lo = col_idx_.begin() + row_ptr_[ri];
    auto hi = col_idx_.begin() + row_ptr_[ri + 1];
    auto e = std::lower_bound(lo, hi, ci);
    if (e == hi || *e != ci)
        return std::nullopt;
    return vals_[e - col_idx_.begin()];
}

void AssociativeArray::check_invariants() const {
    auto fail = [](const char* msg) { throw Error(std::string("invariant violated: ") + msg); };
    if (row_ptr_.size() != rows_.size() + 1)
        fail("row_ptr size");
    if (row_ptr_.front() != 0 || row_ptr_.back() != vals_.size() ||
        col_idx_.size() != vals_.size())
        fail("entry counts");
    if (!std::is_sorted(rows_.begin(), rows_.end()) ||
        std::adjacent_find(rows_.begin(), rows_.end()) != rows_.end())
        fail("row keys not sorted unique");
    if (!std::is_sorted(cols_.begin(), cols_.end()) ||
        std::adjacent_find(cols_.begin(), cols_.end()) != cols_.end())
        fail("col keys not sorted unique");
    for (const auto& k : rows_)
        if (k.empty())
            fail("empty row key");
    for (const auto& k : cols_)
        if (k.empty())
            fail("empty col key");
    std::vector<char> col_used(cols_.size(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (row_ptr_[i] >= row_ptr_[i + 1])
            fail("phantom row key");
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
            if (col_idx_[e] >= cols_.size())
                fail("col id out of range");
            if (e > row_ptr_[i] && col_idx_[e] <= col_idx_[e - 1])
                fail("col ids not strictly increasing in row");
            if (is_zero(vals_[e]))
                fail("stored zero value");
            col_used[col_idx_[e]] = 1;
        }
    }
    for (char u : col_used)
        if (!u)
            fail("phantom col key");
}

// ------------------------------------------------------------- select

namespace {

// Marks the selected positions of a sorted key vector; empty result vector
// means "all".
std::vector<char> mark_selection(const std::vector<std::string>& keys, const KeySpec& spec) {
    std::vector<char> sel;
    if (spec.kind() == KeySpec::Kind::All)
        return sel;
    sel.assign(keys.size(), 0);
    switch (spec.kind()) {
    case KeySpec::Kind::Exact:
        for (const auto& k : spec.keys()) {
            auto it = std::lower_bound(keys.begin(), keys.end(), k);
            if (it != keys.end() && *it == k)
                sel[it - keys.begin()] = 1;
        }
        break;
    case KeySpec::Kind::Prefix: {
        const std::string& p = spec.lo();
        for (auto it = std::lower_bound(keys.begin(), keys.end(), p);
             it != keys.end() && it->compare(0, p.size(), p) == 0; ++it)
            sel[it - keys.begin()] = 1;
        break;
    }
    case KeySpec::Kind::Range: {
        auto lo = std::lower_bound(keys.begin(), keys.end(), spec.lo());
        auto hi = std::upper_bound(keys.begin(), keys.end(), spec.hi());
        for (auto it = lo; it != hi; ++it)
            sel[it - keys.begin()] = 1;
        break;
    }
    default:
        break;
    }
    return sel;
}

} // namespace

AssociativeArray select(const AssociativeArray& a, const KeySpec& rows, const KeySpec& cols) {
    const auto rsel = mark_selection(a.rows_, rows);
    const auto csel = mark_selection(a.cols_, cols);
    std::vector<std::uint32_t> er, ec;
    std::vector<Value> ev;
    for (std::size_t i = 0; i < a.rows_.size(); ++i) {
        if (!rsel.empty() && !rsel[i])
            continue;
        for (std::size_t e = a.row_ptr_[i]; e < a.row_ptr_[i + 1]; ++e) {
            if (!csel.empty() && !csel[a.col_idx_[e]])
                continue;
            er.push_back(static_cast<std::uint32_t>(i));
            ec.push_back(a.col_idx_[e]);
            ev.push_back(a.vals_[e]);
        }
    }
    return AssociativeArray::from_indexed(a.rows_, a.cols_, std::move(er), std::move(ec),
                                          std::move(ev));
}

// ------------------------------------------------------------ combine

namespace {

void require_num_pair(const Value& x, const Value& y) {
    if (!x.is_num() || !y.is_num())
        throw TypeMismatch("cannot combine numeric and string values");
}

} // namespace

AssociativeArray combine(const AssociativeArray& a, const AssociativeArray& b, CombineOp op) {
    std::vector<std::uint32_t> armap, brmap, acmap, bcmap;
    auto rows = merge_keys(a.rows_, b.rows_, armap, brmap);
    auto cols = merge_keys(a.cols_, b.cols_, acmap, bcmap);

    const bool sub = op == CombineOp::Sub;
    auto reject_str_in_sub = [sub](const Value& v) {
        if (sub && v.is_str())
            throw TypeMismatch("subtraction is undefined on string values");
    };

    std::vector<std::uint32_t> er, ec;
    std::vector<Value> ev;
    auto emit = [&](std::uint32_t r, std::uint32_t c, Value v) {
        er.push_back(r);
        ec.push_back(c);
        ev.push_back(std::move(v));
    };
    auto emit_single = [&](std::uint32_t r, std::uint32_t c, const Value& v, bool from_b) {
        reject_str_in_sub(v);
        switch (op) {
        case CombineOp::Add:
        case CombineOp::Max:
            emit(r, c, v);
            break;
        case CombineOp::Sub:
            emit(r, c, from_b ? Value::num(-v.num_value()) : v);
            break;
        case CombineOp::Min:
            break; // intersection semantics
        }
    };
    auto emit_pair = [&](std::uint32_t r, std::uint32_t c, const Value& x, const Value& y) {
        require_num_pair(x, y);
        double v = 0;
        switch (op) {
        case CombineOp::Add:
            v = x.num_value() + y.num_value();
            break;
        case CombineOp::Sub:
            v = x.num_value() - y.num_value();
            break;
        case CombineOp::Min:
            v = std::min(x.num_value(), y.num_value());
            break;
        case CombineOp::Max:
            v = std::max(x.num_value(), y.num_value());
            break;
        }
        emit(r, c, Value::num(v));
    };

    std::size_t ai = 0, bi = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const bool in_a = ai < a.rows_.size() && armap[ai] == r;
        const bool in_b = bi < b.rows_.size() && brmap[bi] == r;
        std::size_t ae = in_a ? a.row_ptr_[ai] : 0, aend = in_a ? a.row_ptr_[ai + 1] : 0;
        std::size_t be = in_b ? b.row_ptr_[bi] : 0, bend = in_b ? b.row_ptr_[bi + 1] : 0;
        while (ae < aend || be < bend) {
            const std::uint32_t acol =
                ae < aend ? acmap[a.col_idx_[ae]] : std::numeric_limits<std::uint32_t>::max();
            const std::uint32_t bcol =
                be < bend ? bcmap[b.col_idx_[be]] : std::numeric_limits<std::uint32_t>::max();
            if (acol < bcol) {
                emit_single(static_cast<std::uint32_t>(r), acol, a.vals_[ae], false);
                ++ae;
            } else if (bcol < acol) {
                emit_single(static_cast<std::uint32_t>(r), bcol, b.vals_[be], true);
                ++be;
            } else {
                emit_pair(static_cast<std::uint32_t>(r), acol, a.vals_[ae], b.vals_[be]);
                ++ae;
                ++be;
            }
        }
        if (in_a)
            ++ai;
        if (in_b)
            ++bi;
    }
    return AssociativeArray::from_indexed(std::move(rows), std::move(cols), std::move(er),
                                          std::move(ec), std::move(ev));
}

// ----------------------------------------------------------- multiply

AssociativeArray multiply(const AssociativeArray& a, const AssociativeArray& b) {
    // Contraction pairs a's col keys with b's row keys by key equality.
    std::vector<std::uint32_t> match(a.cols_.size(), kNoMatch);
    {
        std::size_t i = 0, j = 0;
        while (i < a.cols_.size() && j < b.rows_.size()) {
            const int cmp = a.cols_[i].compare(b.rows_[j]);
            if (cmp < 0)
                ++i;
            else if (cmp > 0)
                ++j;
            else
                match[i++] = static_cast<std::uint32_t>(j++);
        }
    }

    const auto n_rows = static_cast<std::int64_t>(a.rows_.size());
    const std::size_t n_cols = b.cols_.size();
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows_out(a.rows_.size());

#pragma omp parallel
    {
        std::vector<double> acc(n_cols, 0.0);
        std::vector<std::uint32_t> stamp(n_cols, kNoMatch);
        std::vector<std::uint32_t> touched;

#pragma omp for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < n_rows; ++i) {
            touched.clear();
            for (std::size_t e = a.row_ptr_[i]; e < a.row_ptr_[i + 1]; ++e) {
                const std::uint32_t r = match[a.col_idx_[e]];
                if (r == kNoMatch)
                    continue;
                const double av = a.vals_[e].as_number();
                for (std::size_t f = b.row_ptr_[r]; f < b.row_ptr_[r + 1]; ++f) {
                    const std::uint32_t c = b.col_idx_[f];
                    if (stamp[c] != static_cast<std::uint32_t>(i)) {
                        stamp[c] = static_cast<std::uint32_t>(i);
                        acc[c] = 0.0;
                        touched.push_back(c);
                    }
                    acc[c] += av * b.vals_[f].as_number();
                }
            }
            std::sort(touched.begin(), touched.end());
            auto& out = rows_out[i];
            out.reserve(touched.size());
            for (std::uint32_t c : touched)
                if (acc[c] != 0.0)
                    out.emplace_back(c, acc[c]);
        }
    }

    std::vector<std::uint32_t> er, ec;
    std::vector<Value> ev;
    for (std::size_t i = 0; i < rows_out.size(); ++i)
        for (const auto& [c, v] : rows_out[i]) {
            er.push_back(static_cast<std::uint32_t>(i));
            ec.push_back(c);
            ev.push_back(Value::num(v));
        }
    return AssociativeArray::from_indexed(a.rows_, b.cols_, std::move(er), std::move(ec),
                                          std::move(ev));
}

// ---------------------------------------------------------- transpose

AssociativeArray transpose(const AssociativeArray& a) {
    const std::size_t n = a.nnz();
    std::vector<std::size_t> next(a.cols_.size() + 1, 0);
    for (std::uint32_t c : a.col_idx_)
        next[c + 1]++;
    std::partial_sum(next.begin(), next.end(), next.begin());

    std::vector<std::uint32_t> er(n), ec(n);
    std::vector<Value> ev(n, Value::num(1.0));
    for (std::size_t i = 0; i < a.rows_.size(); ++i)
        for (std::size_t e = a.row_ptr_[i]; e < a.row_ptr_[i + 1]; ++e) {
            const std::size_t pos = next[a.col_idx_[e]]++;
            er[pos] = a.col_idx_[e];
            ec[pos] = static_cast<std::uint32_t>(i);
            ev[pos] = a.vals_[e];
        }
    return AssociativeArray::from_indexed(a.cols_, a.rows_, std::move(er), std::move(ec),
                                          std::move(ev));
}

// ---------------------------------------------------------- threshold

AssociativeArray threshold(const AssociativeArray& a, double cut) {
    std::vector<std::uint32_t> er, ec;
    std::vector<Value> ev;
    for (std::size_t i = 0; i < a.rows_.size(); ++i)
        for (std::size_t e = a.row_ptr_[i]; e < a.row_ptr_[i + 1]; ++e) {
            if (!a.vals_[e].is_num())
                throw TypeMismatch("threshold requires numeric values");
            if (a.vals_[e].num_value() > cut) {
                er.push_back(static_cast<std::uint32_t>(i));
                ec.push_back(a.col_idx_[e]);
                ev.push_back(a.vals_[e]);
            }
        }
    return AssociativeArray::from_indexed(a.rows_, a.cols_, std::move(er), std::move(ec),
                                          std::move(ev));
}

// -------------------------------------------------- serial reference

namespace reference {

AssociativeArray multiply(const AssociativeArray& a, const AssociativeArray& b) {
    std::map<std::string, std::vector<Triple>> b_rows;
    for (auto& t : b.to_triples())
        b_rows[t.row].push_back(t);

    std::map<std::pair<std::string, std::string>, double> acc;
    for (const auto& ta : a.to_triples()) {
        auto it = b_rows.find(ta.col);
        if (it == b_rows.end())
            continue;
        for (const auto& tb : it->second)
            acc[{ta.row, tb.col}] += ta.val.as_number() * tb.val.as_number();
    }

    std::vector<Triple> out;
    out.reserve(acc.size());
    for (auto& [rc, v] : acc)
        if (v != 0.0)
            out.push_back({rc.first, rc.second, Value::num(v)});
    return AssociativeArray::from_triples(std::move(out), CollisionRule::LastWins);
}

} // namespace reference

} // namespace cmd
