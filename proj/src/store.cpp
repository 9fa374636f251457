#include "cmd/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "cmd/wire.hpp"

namespace cmd::store {

namespace {

constexpr char kMagic[4] = {'C', 'M', 'D', 'T'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::size_t kHeaderLen = 5;

[[noreturn]] void io_fail(const std::string& what) {
    throw IoFailure(what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view buf) {
    std::size_t done = 0;
    while (done < buf.size()) {
        const ssize_t n = ::write(fd, buf.data() + done, buf.size() - done);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            io_fail("write");
        }
        done += static_cast<std::size_t>(n);
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        io_fail("open " + p.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        io_fail("read " + p.string());
    return data;
}

struct FdCloser {
    int fd = -1;
    ~FdCloser() {
        if (fd >= 0)
            ::close(fd);
    }
    int release() {
        const int f = fd;
        fd = -1;
        return f;
    }
};

} // namespace

struct Table::Impl {
    std::filesystem::path dir, log, meta_path, lock_path;
    int log_fd = -1, lock_fd = -1;
    std::uint64_t next_seq = 0;
    std::optional<std::string> meta;
    std::map<std::pair<std::string, std::string>, std::pair<std::uint64_t, Value>> index;
    mutable std::shared_mutex mu;

    ~Impl() {
        if (log_fd >= 0)
            ::close(log_fd);
        if (lock_fd >= 0)
            ::close(lock_fd); // releases the flock
    }

    void append_record(std::string& out, std::uint64_t seq, std::string_view row,
                       std::string_view col, std::string_view val) const {
        std::string body;
        body.reserve(8 + row.size() + col.size() + val.size() + 12);
        wire::put_u64be(body, seq);
        wire::put_lstring(body, row);
        wire::put_lstring(body, col);
        wire::put_lstring(body, val);
        wire::put_varint(out, body.size());
        out += body;
        wire::put_u32be(out, wire::crc32c(body));
    }

    // Parses records from `data` after the header, feeding the index.
    // Returns the offset just past the last valid record.
    std::size_t load_records(std::string_view data, std::size_t& good_count) {
        std::size_t pos = kHeaderLen;
        good_count = 0;
        while (pos < data.size()) {
            const std::size_t record_start = pos;
            std::uint64_t body_len;
            if (!wire::get_varint(data, pos, body_len) || body_len > data.size() - pos ||
                data.size() - pos - body_len < 4)
                return record_start;
            const std::string_view body = data.substr(pos, body_len);
            std::size_t crc_pos = pos + body_len;
            std::uint32_t stored_crc = 0;
            wire::get_u32be(data, crc_pos, stored_crc);
            if (wire::crc32c(body) != stored_crc)
                return record_start;

            std::size_t bp = 0;
            std::uint64_t seq;
            std::string row, col, val_text;
            if (!wire::get_u64be(body, bp, seq) || !wire::get_lstring(body, bp, row) ||
                !wire::get_lstring(body, bp, col) || !wire::get_lstring(body, bp, val_text) ||
                bp != body.size())
                return record_start;
            Value val = Value::num(1.0);
            try {
                val = Value::from_text(val_text);
            } catch (const Error&) {
                return record_start;
            }

            auto key = std::pair{std::move(row), std::move(col)};
            const auto it = index.find(key);
            if (it == index.end())
                index.emplace(std::move(key), std::pair{seq, std::move(val)});
            else if (it->second.first <= seq)
                it->second = {seq, std::move(val)};
            if (seq >= next_seq)
                next_seq = seq + 1;
            ++good_count;
            pos = crc_pos;
        }
        return pos;
    }
};

Table::Table() : impl_(new Impl) {}
Table::Table(Table&&) noexcept = default;
Table& Table::operator=(Table&&) noexcept = default;
Table::~Table() = default;

Table Table::open(const std::filesystem::path& dir, std::string_view name, Options opts) {
    Table t;
    Impl& im = *t.impl_;
    im.dir = dir;
    im.log = dir / (std::string(name) + ".log");
    im.meta_path = dir / (std::string(name) + ".meta");
    im.lock_path = dir / (std::string(name) + ".lock");

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    FdCloser lock{::open(im.lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644)};
    if (lock.fd < 0)
        io_fail("open " + im.lock_path.string());
    if (::flock(lock.fd, LOCK_EX | LOCK_NB) != 0) {
        if (errno == EWOULDBLOCK)
            throw ConcurrentWriter("table '" + std::string(name) + "' has an active writer");
        io_fail("flock");
    }

    const bool exists = std::filesystem::exists(im.log);
    if (!exists && !opts.create_if_missing)
        throw NotFound("table '" + std::string(name) + "' does not exist");

    if (!exists) {
        FdCloser fd{::open(im.log.c_str(), O_CREAT | O_EXCL | O_WRONLY | O_CLOEXEC, 0644)};
        if (fd.fd < 0)
            io_fail("create " + im.log.string());
        std::string header(kMagic, sizeof kMagic);
        header += static_cast<char>(kVersion);
        write_all(fd.fd, header);
        if (::fsync(fd.fd) != 0)
            io_fail("fsync");
        im.log_fd = fd.release();
    } else {
        const std::string data = read_file(im.log);
        if (data.size() < kHeaderLen || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0 ||
            static_cast<std::uint8_t>(data[4]) != kVersion)
            throw Corrupt("table file lacks a valid header", 0);
        std::size_t good_count = 0;
        const std::size_t good_end = im.load_records(data, good_count);
        if (good_end != data.size()) {
            if (!opts.repair)
                throw Corrupt("table log has a corrupt tail (" + std::to_string(good_count) +
                                  " entries recovered)",
                              good_count);
            if (::truncate(im.log.c_str(), static_cast<off_t>(good_end)) != 0)
                io_fail("truncate");
        }
        FdCloser fd{::open(im.log.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC)};
        if (fd.fd < 0)
            io_fail("open " + im.log.string());
        im.log_fd = fd.release();
    }

    if (std::filesystem::exists(im.meta_path))
        im.meta = read_file(im.meta_path);
    im.lock_fd = lock.release();
    return t;
}

std::size_t Table::put(const AssociativeArray& a) {
    Impl& im = *impl_;
    std::unique_lock lk(im.mu);

    const auto triples = a.to_triples();
    std::string buf;
    std::uint64_t seq = im.next_seq;
    for (const auto& t : triples)
        im.append_record(buf, seq++, t.row, t.col, t.val.text());
    write_all(im.log_fd, buf);
    if (::fsync(im.log_fd) != 0)
        io_fail("fsync");

    im.next_seq = seq;
    seq -= triples.size();
    for (const auto& t : triples)
        im.index.insert_or_assign({t.row, t.col}, std::pair{seq++, t.val});
    return triples.size();
}

AssociativeArray Table::query(const KeySpec& rows, const KeySpec& cols) const {
    const Impl& im = *impl_;
    std::shared_lock lk(im.mu);

    std::vector<Triple> out;
    // Row specs other than All seek straight to their key range, so exact
    // lookups cost the row group, not the table.
    auto walk_from = [&](const std::string& from, auto in_group) {
        for (auto it = im.index.lower_bound({from, std::string()});
             it != im.index.end() && in_group(it->first.first); ++it)
            if (cols.matches(it->first.second))
                out.push_back({it->first.first, it->first.second, it->second.second});
    };

    switch (rows.kind()) {
    case KeySpec::Kind::All:
        for (const auto& [rc, sv] : im.index)
            if (cols.matches(rc.second))
                out.push_back({rc.first, rc.second, sv.second});
        break;
    case KeySpec::Kind::Exact:
        for (const auto& k : rows.keys())
            walk_from(k, [&k](const std::string& r) { return r == k; });
        break;
    case KeySpec::Kind::Prefix:
        walk_from(rows.lo(), [&p = rows.lo()](const std::string& r) {
            return r.compare(0, p.size(), p) == 0;
        });
        break;
    case KeySpec::Kind::Range:
        walk_from(rows.lo(), [&hi = rows.hi()](const std::string& r) { return r <= hi; });
        break;
    }
    return AssociativeArray::from_triples(std::move(out), CollisionRule::LastWins);
}

AssociativeArray Table::scan_all() const {
    const Impl& im = *impl_;
    std::shared_lock lk(im.mu);
    std::vector<Triple> out;
    out.reserve(im.index.size());
    for (const auto& [rc, sv] : im.index)
        out.push_back({rc.first, rc.second, sv.second});
    return AssociativeArray::from_triples(std::move(out), CollisionRule::LastWins);
}

void Table::compact() {
    Impl& im = *impl_;
    std::unique_lock lk(im.mu);

    const std::filesystem::path tmp = im.log.string() + ".tmp";
    FdCloser fd{::open(tmp.c_str(), O_CREAT | O_TRUNC | O_WRONLY | O_CLOEXEC, 0644)};
    if (fd.fd < 0)
        io_fail("create " + tmp.string());

    std::string buf(kMagic, sizeof kMagic);
    buf += static_cast<char>(kVersion);
    std::uint64_t seq = 0;
    for (const auto& [rc, sv] : im.index)
        im.append_record(buf, seq++, rc.first, rc.second, sv.second.text());
    write_all(fd.fd, buf);
    if (::fsync(fd.fd) != 0)
        io_fail("fsync");

    std::filesystem::rename(tmp, im.log);
    ::close(im.log_fd);
    im.log_fd = ::open(im.log.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (im.log_fd < 0)
        io_fail("reopen " + im.log.string());

    // Renumber the index to match the rewritten log.
    seq = 0;
    for (auto& [rc, sv] : im.index)
        sv.first = seq++;
    im.next_seq = seq;
}

void Table::set_meta(std::string text) {
    Impl& im = *impl_;
    std::unique_lock lk(im.mu);
    FdCloser fd{::open(im.meta_path.c_str(), O_CREAT | O_TRUNC | O_WRONLY | O_CLOEXEC, 0644)};
    if (fd.fd < 0)
        io_fail("create " + im.meta_path.string());
    write_all(fd.fd, text);
    if (::fsync(fd.fd) != 0)
        io_fail("fsync");
    im.meta = std::move(text);
}

const std::optional<std::string>& Table::meta() const { return impl_->meta; }

std::size_t Table::live_entries() const {
    std::shared_lock lk(impl_->mu);
    return impl_->index.size();
}

const std::filesystem::path& Table::log_path() const { return impl_->log; }

} // namespace cmd::store
