#include "cmd/crypto/mask.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <tuple>

#include "cmd/crypto/base64.hpp"
#include "cmd/crypto/det.hpp"
#include "cmd/crypto/ope.hpp"
#include "cmd/parallel.hpp"
#include "cmd/triple_text.hpp"

namespace cmd::crypto {

std::string_view scheme_name(Scheme s) {
    switch (s) {
    case Scheme::Clear:
        return "CLEAR";
    case Scheme::Det:
        return "DET";
    case Scheme::Ope:
        return "OPE";
    case Scheme::Rnd:
        return "RND";
    case Scheme::HomPlus:
        return "HOMPLUS";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "CLEAR")
        return Scheme::Clear;
    if (name == "DET")
        return Scheme::Det;
    if (name == "OPE")
        return Scheme::Ope;
    if (name == "RND")
        return Scheme::Rnd;
    if (name == "HOMPLUS")
        return Scheme::HomPlus;
    throw ParseError("unknown scheme '" + std::string(name) + "'");
}

void MaskPolicy::validate() const {
    auto key_scheme = [](Scheme s) {
        return s == Scheme::Clear || s == Scheme::Det || s == Scheme::Ope;
    };
    if (!key_scheme(rows) || !key_scheme(cols))
        throw PolicyMismatch("row and column schemes must be DET, OPE or CLEAR");
    if (values == Scheme::Det || values == Scheme::Ope)
        throw PolicyMismatch("value scheme must be RND, HOMPLUS or CLEAR");
}

namespace {

std::uint64_t hom_plaintext(const Value& v) {
    if (!v.is_num())
        throw PolicyMismatch("HOMPLUS needs numeric values");
    const double d = v.num_value();
    if (!(d >= 0.0) || d != std::floor(d) || d >= 18446744073709551616.0)
        throw PolicyMismatch("HOMPLUS needs non-negative integers below 2^64");
    return static_cast<std::uint64_t>(d);
}

std::vector<std::string> transform_keys(const std::vector<std::string>& keys, Scheme s,
                                        const MaskKeySet& ks, const OpeCipher& ope,
                                        bool masking) {
    if (s == Scheme::Clear)
        return keys;
    std::vector<std::string> out(keys.size());
    parallel_for_guarded(keys.size(), [&](std::size_t i) {
        if (s == Scheme::Det)
            out[i] = masking ? det_mask_text(ks.det_key, keys[i])
                             : det_unmask_text(ks.det_key, keys[i]);
        else
            out[i] = masking ? ope.mask_text(keys[i]) : ope.unmask_text(keys[i]);
    });
    return out;
}

Value unmask_value(const Value& v, Scheme s, const MaskKeySet& ks) {
    if (!v.is_str())
        throw SchemeMismatch("masked value is not a ciphertext string");
    const std::string& t = v.str_value();
    const char tag = s == Scheme::Rnd ? 'R' : 'H';
    if (t.size() < 2 || t[0] != tag || t[1] != ':')
        throw SchemeMismatch(std::string("value does not carry the ") +
                             std::string(scheme_name(s)) + " tag");
    std::string blob;
    try {
        blob = b64_decode(std::string_view(t).substr(2));
    } catch (const ParseError& e) {
        throw DecryptFailure(e.what());
    }
    if (s == Scheme::Rnd) {
        try {
            return Value::from_text(gcm_open(ks.rnd_key, blob));
        } catch (const AuthFailure&) {
            throw DecryptFailure("value failed authentication (wrong password or tampering)");
        } catch (const ParseError& e) {
            throw DecryptFailure(e.what());
        }
    }
    // Sums can exceed 2^53; the double conversion is then the closest
    // representable value.
    const mpz_class m = hom_decrypt(ks.hom, blob);
    return Value::num(mpz_get_d(m.get_mpz_t()));
}

std::vector<Triple> reassemble(const AssociativeArray& a, const std::vector<std::string>& rows,
                               const std::vector<std::string>& cols,
                               const std::vector<Value>& vals) {
    std::vector<Triple> triples;
    triples.reserve(a.nnz());
    const auto& rp = a.row_ptr();
    const auto& ec = a.entry_cols();
    for (std::size_t i = 0; i + 1 < rp.size(); ++i)
        for (std::size_t e = rp[i]; e < rp[i + 1]; ++e)
            triples.push_back({rows[i], cols[ec[e]], vals[e]});
    return triples;
}

} // namespace

MaskedArray mask_array(const AssociativeArray& a, const MaskPolicy& policy,
                       const MaskKeySet& keys) {
    policy.validate();
    const OpeCipher ope(keys.ope_key);

    const auto mrows = transform_keys(a.row_keys(), policy.rows, keys, ope, true);
    const auto mcols = transform_keys(a.col_keys(), policy.cols, keys, ope, true);

    const auto& vals = a.entry_vals();
    std::vector<Value> mvals;
    if (policy.values == Scheme::Clear) {
        mvals = vals;
    } else {
        if (policy.values == Scheme::HomPlus)
            for (const auto& v : vals)
                hom_plaintext(v); // reject bad values before any work
        mvals.assign(vals.size(), Value::num(1.0));
        parallel_for_guarded(vals.size(), [&](std::size_t e) {
            if (policy.values == Scheme::Rnd)
                mvals[e] =
                    Value::str("R:" + b64_encode(gcm_seal(keys.rnd_key, vals[e].text())));
            else
                mvals[e] = Value::str(
                    "H:" + b64_encode(hom_encrypt(keys.hom.pub, hom_plaintext(vals[e]))));
        });
    }

    MaskedArray out;
    out.policy = policy;
    out.salt = keys.kdf_salt;
    out.payload = AssociativeArray::from_triples(reassemble(a, mrows, mcols, mvals),
                                                 CollisionRule::LastWins);
    return out;
}

AssociativeArray unmask_array(const MaskedArray& m, const MaskKeySet& keys) {
    m.policy.validate();
    const OpeCipher ope(keys.ope_key);

    const auto rows = transform_keys(m.payload.row_keys(), m.policy.rows, keys, ope, false);
    const auto cols = transform_keys(m.payload.col_keys(), m.policy.cols, keys, ope, false);

    const auto& vals = m.payload.entry_vals();
    std::vector<Value> pvals;
    if (m.policy.values == Scheme::Clear) {
        pvals = vals;
    } else {
        pvals.assign(vals.size(), Value::num(1.0));
        parallel_for_guarded(vals.size(), [&](std::size_t e) {
            pvals[e] = unmask_value(vals[e], m.policy.values, keys);
        });
    }
    return AssociativeArray::from_triples(reassemble(m.payload, rows, cols, pvals),
                                          CollisionRule::LastWins);
}

std::string str_mask(std::string_view word, const MaskKeySet& keys, Scheme scheme) {
    if (word.empty())
        throw InvalidValue("cannot mask an empty key");
    switch (scheme) {
    case Scheme::Det:
        return det_mask_text(keys.det_key, word);
    case Scheme::Ope:
        return OpeCipher(keys.ope_key).mask_text(word);
    case Scheme::Clear:
        return std::string(word);
    default:
        throw PolicyMismatch("single-key masking works with DET, OPE or CLEAR");
    }
}

MaskPolicy read_policy(std::istream& in) {
    auto field = [&in](const char* prefix) {
        std::string line;
        if (!std::getline(in, line))
            throw ParseError("policy needs three lines: rows=, cols=, values=");
        const std::string_view want(prefix);
        if (line.compare(0, want.size(), want) != 0)
            throw ParseError("expected policy line starting with '" + std::string(want) + "'");
        return parse_scheme(std::string_view(line).substr(want.size()));
    };
    MaskPolicy p;
    p.rows = field("rows=");
    p.cols = field("cols=");
    p.values = field("values=");
    p.validate();
    return p;
}

void write_policy(std::ostream& out, const MaskPolicy& p) {
    out << "rows=" << scheme_name(p.rows) << '\n'
        << "cols=" << scheme_name(p.cols) << '\n'
        << "values=" << scheme_name(p.values) << '\n';
}

void write_masked(std::ostream& out, const MaskedArray& m) {
    out << "salt="
        << to_hex(std::string_view(reinterpret_cast<const char*>(m.salt.data()), m.salt.size()))
        << '\n';
    out << "policy=" << scheme_name(m.policy.rows) << ',' << scheme_name(m.policy.cols) << ','
        << scheme_name(m.policy.values) << '\n';
    write_triples(out, m.payload);
}

std::pair<Salt128, MaskPolicy> read_masked_header(std::istream& in) {
    Salt128 out_salt{};
    std::string line;
    if (!std::getline(in, line) || line.compare(0, 5, "salt=") != 0)
        throw ParseError("masked file must start with a salt= line");
    const std::string salt = from_hex(std::string_view(line).substr(5));
    if (salt.size() != out_salt.size())
        throw ParseError("salt must be 16 bytes of hex");
    std::copy(salt.begin(), salt.end(), reinterpret_cast<char*>(out_salt.data()));

    if (!std::getline(in, line) || line.compare(0, 7, "policy=") != 0)
        throw ParseError("masked file needs a policy= line");
    const std::string_view spec = std::string_view(line).substr(7);
    const auto c1 = spec.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(',', c1 + 1);
    if (c2 == std::string_view::npos || spec.find(',', c2 + 1) != std::string_view::npos)
        throw ParseError("policy line needs exactly three schemes");
    MaskPolicy policy;
    policy.rows = parse_scheme(spec.substr(0, c1));
    policy.cols = parse_scheme(spec.substr(c1 + 1, c2 - c1 - 1));
    policy.values = parse_scheme(spec.substr(c2 + 1));
    policy.validate();
    return {out_salt, policy};
}

MaskedArray read_masked(std::istream& in) {
    MaskedArray m;
    std::tie(m.salt, m.policy) = read_masked_header(in);
    m.payload = read_triples(in);
    return m;
}

} // namespace cmd::crypto
