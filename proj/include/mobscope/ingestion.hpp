#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mobscope {

struct CommentRecord {
    std::string channel_id;
    std::string video_id;
    std::string commenter_id;
    std::string comment_id;
    std::optional<std::string> text;
    std::optional<std::int64_t> timestamp;  // seconds since the Unix epoch, UTC

    bool operator==(const CommentRecord&) const = default;
};

struct ChannelDataset {
    std::string channel_id;
    std::set<std::string> video_ids;
    std::vector<CommentRecord> records;  // sorted by comment_id
    std::map<std::string, std::string> metadata;
};

// Immutable after load; safe to share read-only across threads.
struct Corpus {
    std::map<std::string, ChannelDataset> channels;
};

struct ChannelStats {
    std::string channel_id;
    std::int64_t videos = 0;
    std::int64_t comments = 0;
    std::int64_t commenters = 0;
};

struct CorpusStats {
    std::int64_t n_channels = 0;
    std::int64_t n_videos = 0;
    std::int64_t n_comments = 0;
    std::int64_t n_commenters = 0;  // unique across the whole corpus
    std::vector<ChannelStats> per_channel;
};

enum class CorpusFormat { jsonl, csv };

// Group validated records into a Corpus. Rejects duplicate comment ids.
// Records are stored sorted by comment_id, so the result does not depend
// on input order.
Corpus corpus_from_records(std::vector<CommentRecord> records);

Corpus load_corpus(const std::string& path, CorpusFormat format);
CorpusStats corpus_stats(const Corpus& corpus);

// Compact binary corpus container (CBOR payload, versioned header).
void save_corpus_bin(const std::string& path, const Corpus& corpus,
                     const std::map<std::string, std::string>& header_extra = {});
Corpus load_corpus_bin(const std::string& path);

// Dispatch on extension: .bin/.cbor, .jsonl/.ndjson, .csv.
Corpus load_corpus_any(const std::string& path,
                       std::optional<CorpusFormat> format = std::nullopt);

void write_corpus_jsonl(std::ostream& out, const Corpus& corpus);
void write_corpus_csv(std::ostream& out, const Corpus& corpus);

// RFC 3339 timestamps ("2024-01-31T17:05:00Z", fractional seconds and
// numeric offsets accepted). Returns nullopt on malformed input.
std::optional<std::int64_t> parse_rfc3339(const std::string& s);
std::string format_rfc3339(std::int64_t epoch_seconds);

// Pluggable comment source. The file-backed implementation below is the
// only one shipped; a live platform client would implement the same
// interface.
class CommentSource {
public:
    virtual ~CommentSource() = default;
    virtual ChannelDataset fetch_channel(const std::string& channel_id) = 0;
};

class FileCommentSource final : public CommentSource {
public:
    explicit FileCommentSource(Corpus corpus) : corpus_(std::move(corpus)) {}

    ChannelDataset fetch_channel(const std::string& channel_id) override;
    std::vector<std::string> channel_ids() const;

private:
    Corpus corpus_;
};

}  // namespace mobscope
