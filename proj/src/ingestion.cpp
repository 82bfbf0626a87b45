#include "mobscope/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "mobscope/csv.hpp"
#include "mobscope/errors.hpp"

namespace mobscope {

using nlohmann::json;

namespace {

constexpr const char* kCsvHeader = "channel_id,video_id,commenter_id,comment_id,timestamp,text";

std::ifstream open_or_throw(const std::string& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw FileNotFoundError(path);
    return in;
}

void require_nonempty(const std::string& value, const char* field, std::size_t row) {
    if (value.empty()) throw ParseError(row, std::string("empty ") + field);
}

// Days from 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

unsigned last_day_of_month(std::int64_t y, unsigned m) {
    static const unsigned days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
    return days[m - 1];
}

bool parse_fixed_uint(const std::string& s, std::size_t pos, std::size_t len, long& out) {
    long v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        if (pos + i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos + i])))
            return false;
        v = v * 10 + (s[pos + i] - '0');
    }
    out = v;
    return true;
}

}  // namespace

std::optional<std::int64_t> parse_rfc3339(const std::string& s) {
    // YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)
    long y, mo, d, h, mi, se;
    if (s.size() < 20) return std::nullopt;
    if (!parse_fixed_uint(s, 0, 4, y) || s[4] != '-' || !parse_fixed_uint(s, 5, 2, mo) ||
        s[7] != '-' || !parse_fixed_uint(s, 8, 2, d))
        return std::nullopt;
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
    if (!parse_fixed_uint(s, 11, 2, h) || s[13] != ':' || !parse_fixed_uint(s, 14, 2, mi) ||
        s[16] != ':' || !parse_fixed_uint(s, 17, 2, se))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 ||
        d > static_cast<long>(last_day_of_month(y, static_cast<unsigned>(mo))) || h > 23 ||
        mi > 59 || se > 60)
        return std::nullopt;
    if (se == 60) se = 59;  // leap second: clamp
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }
    if (pos >= s.size()) return std::nullopt;
    std::int64_t offset = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        long oh, om;
        if (!parse_fixed_uint(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !parse_fixed_uint(s, pos + 4, 2, om) || oh > 23 || om > 59)
            return std::nullopt;
        offset = (oh * 3600 + om * 60) * (s[pos] == '+' ? 1 : -1);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
           h * 3600 + mi * 60 + se - offset;
}

std::string format_rfc3339(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem % 3600) / 60), static_cast<long long>(rem % 60));
    return buf;
}

Corpus corpus_from_records(std::vector<CommentRecord> records) {
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(records.size() * 2);
    for (const auto& r : records) {
        if (r.channel_id.empty() || r.video_id.empty() || r.commenter_id.empty() ||
            r.comment_id.empty())
            throw InputError("record with empty id field (comment_id '" + r.comment_id + "')");
        if (!seen_ids.insert(r.comment_id).second) throw DuplicateCommentIdError(r.comment_id);
    }
    Corpus corpus;
    for (auto& r : records) {
        ChannelDataset& ch = corpus.channels[r.channel_id];
        ch.channel_id = r.channel_id;
        ch.video_ids.insert(r.video_id);
        ch.records.push_back(std::move(r));
    }
    for (auto& [id, ch] : corpus.channels) {
        std::sort(ch.records.begin(), ch.records.end(),
                  [](const CommentRecord& a, const CommentRecord& b) {
                      return a.comment_id < b.comment_id;
                  });
    }
    return corpus;
}

namespace {

std::vector<CommentRecord> load_jsonl_records(std::istream& in) {
    std::vector<CommentRecord> records;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(row, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(row, "line is not a JSON object");
        CommentRecord rec;
        auto get_required = [&](const char* key) -> std::string {
            auto it = obj.find(key);
            if (it == obj.end() || !it->is_string())
                throw ParseError(row, std::string("missing string field ") + key);
            return it->get<std::string>();
        };
        rec.channel_id = get_required("channel_id");
        rec.video_id = get_required("video_id");
        rec.commenter_id = get_required("commenter_id");
        rec.comment_id = get_required("comment_id");
        require_nonempty(rec.channel_id, "channel_id", row);
        require_nonempty(rec.video_id, "video_id", row);
        require_nonempty(rec.commenter_id, "commenter_id", row);
        require_nonempty(rec.comment_id, "comment_id", row);
        if (auto it = obj.find("text"); it != obj.end() && it->is_string()) {
            std::string t = it->get<std::string>();
            if (!t.empty()) rec.text = std::move(t);
        }
        if (auto it = obj.find("timestamp"); it != obj.end() && !it->is_null()) {
            if (!it->is_string()) throw ParseError(row, "timestamp must be an RFC 3339 string");
            auto ts = parse_rfc3339(it->get<std::string>());
            if (!ts) throw ParseError(row, "invalid RFC 3339 timestamp: " + it->get<std::string>());
            rec.timestamp = *ts;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<CommentRecord> load_csv_records(std::istream& in) {
    std::vector<CommentRecord> records;
    std::vector<std::string> fields;
    std::size_t line_no = 1;
    std::size_t row = 0;
    if (!read_csv_row(in, fields, line_no)) return records;  // empty file: empty corpus
    {
        std::ostringstream joined;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) joined << ',';
            joined << fields[i];
        }
        if (joined.str() != kCsvHeader)
            throw ParseError(1, std::string("expected header '") + kCsvHeader + "'");
    }
    ++row;
    while (read_csv_row(in, fields, line_no)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != 6)
            throw ParseError(row, "expected 6 fields, got " + std::to_string(fields.size()));
        CommentRecord rec;
        rec.channel_id = fields[0];
        rec.video_id = fields[1];
        rec.commenter_id = fields[2];
        rec.comment_id = fields[3];
        require_nonempty(rec.channel_id, "channel_id", row);
        require_nonempty(rec.video_id, "video_id", row);
        require_nonempty(rec.commenter_id, "commenter_id", row);
        require_nonempty(rec.comment_id, "comment_id", row);
        if (!fields[4].empty()) {
            auto ts = parse_rfc3339(fields[4]);
            if (!ts) throw ParseError(row, "invalid RFC 3339 timestamp: " + fields[4]);
            rec.timestamp = *ts;
        }
        if (!fields[5].empty()) rec.text = fields[5];
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

Corpus load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in = open_or_throw(path, std::ios::in | std::ios::binary);
    std::vector<CommentRecord> records =
        format == CorpusFormat::jsonl ? load_jsonl_records(in) : load_csv_records(in);
    return corpus_from_records(std::move(records));
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats stats;
    stats.n_channels = static_cast<std::int64_t>(corpus.channels.size());
    std::unordered_set<std::string> global_commenters;
    for (const auto& [id, ch] : corpus.channels) {
        ChannelStats row;
        row.channel_id = id;
        row.videos = static_cast<std::int64_t>(ch.video_ids.size());
        row.comments = static_cast<std::int64_t>(ch.records.size());
        std::unordered_set<std::string> local;
        for (const auto& r : ch.records) {
            local.insert(r.commenter_id);
            global_commenters.insert(r.commenter_id);
        }
        row.commenters = static_cast<std::int64_t>(local.size());
        stats.n_videos += row.videos;
        stats.n_comments += row.comments;
        stats.per_channel.push_back(std::move(row));
    }
    stats.n_commenters = static_cast<std::int64_t>(global_commenters.size());
    return stats;
}

void save_corpus_bin(const std::string& path, const Corpus& corpus,
                     const std::map<std::string, std::string>& header_extra) {
    json doc;
    doc["format"] = "mobscope-corpus";
    doc["version"] = 1;
    for (const auto& [k, v] : header_extra) doc[k] = v;
    json channels = json::object();
    for (const auto& [id, ch] : corpus.channels) {
        json recs = json::array();
        for (const auto& r : ch.records) {
            json row = json::array();
            row.push_back(r.video_id);
            row.push_back(r.commenter_id);
            row.push_back(r.comment_id);
            if (r.timestamp) row.push_back(*r.timestamp);
            else row.push_back(nullptr);
            if (r.text) row.push_back(*r.text);
            else row.push_back(nullptr);
            recs.push_back(std::move(row));
        }
        json entry;
        entry["records"] = std::move(recs);
        entry["metadata"] = ch.metadata;
        channels[id] = std::move(entry);
    }
    doc["channels"] = std::move(channels);
    std::vector<std::uint8_t> bytes = json::to_cbor(doc);
    std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

Corpus load_corpus_bin(const std::string& path) {
    std::ifstream in = open_or_throw(path, std::ios::in | std::ios::binary);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    json doc;
    try {
        doc = json::from_cbor(bytes);
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("invalid corpus container: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != "mobscope-corpus" ||
        doc.value("version", 0) != 1)
        throw ParseError(0, "not a mobscope corpus container");
    std::vector<CommentRecord> records;
    std::map<std::string, std::map<std::string, std::string>> metadata;
    std::vector<std::string> declared;  // keeps channels that have no records
    for (const auto& [cid, entry] : doc.at("channels").items()) {
        declared.push_back(cid);
        if (entry.contains("metadata"))
            metadata[cid] = entry.at("metadata").get<std::map<std::string, std::string>>();
        for (const auto& row : entry.at("records")) {
            CommentRecord rec;
            rec.channel_id = cid;
            rec.video_id = row.at(0).get<std::string>();
            rec.commenter_id = row.at(1).get<std::string>();
            rec.comment_id = row.at(2).get<std::string>();
            if (!row.at(3).is_null()) rec.timestamp = row.at(3).get<std::int64_t>();
            if (!row.at(4).is_null()) rec.text = row.at(4).get<std::string>();
            records.push_back(std::move(rec));
        }
    }
    Corpus corpus = corpus_from_records(std::move(records));
    for (const auto& cid : declared) {
        ChannelDataset& ch = corpus.channels[cid];  // creates empty datasets too
        ch.channel_id = cid;
    }
    for (auto& [cid, meta] : metadata) corpus.channels[cid].metadata = std::move(meta);
    return corpus;
}

Corpus load_corpus_any(const std::string& path, std::optional<CorpusFormat> format) {
    if (format) return load_corpus(path, *format);
    auto ends_with = [&](const char* suffix) {
        std::string_view p(path), s(suffix);
        return p.size() >= s.size() && p.substr(p.size() - s.size()) == s;
    };
    if (ends_with(".bin") || ends_with(".cbor")) return load_corpus_bin(path);
    if (ends_with(".jsonl") || ends_with(".ndjson")) return load_corpus(path, CorpusFormat::jsonl);
    if (ends_with(".csv")) return load_corpus(path, CorpusFormat::csv);
    throw InputError("cannot infer corpus format from extension: " + path +
                     " (use --format jsonl|csv or a .bin container)");
}

void write_corpus_jsonl(std::ostream& out, const Corpus& corpus) {
    for (const auto& [cid, ch] : corpus.channels) {
        for (const auto& r : ch.records) {
            json obj;
            obj["channel_id"] = r.channel_id;
            obj["video_id"] = r.video_id;
            obj["commenter_id"] = r.commenter_id;
            obj["comment_id"] = r.comment_id;
            if (r.timestamp) obj["timestamp"] = format_rfc3339(*r.timestamp);
            if (r.text) obj["text"] = *r.text;
            out << obj.dump() << '\n';
        }
    }
}

void write_corpus_csv(std::ostream& out, const Corpus& corpus) {
    out << kCsvHeader << '\n';
    for (const auto& [cid, ch] : corpus.channels) {
        for (const auto& r : ch.records) {
            out << csv_quote(r.channel_id) << ',' << csv_quote(r.video_id) << ','
                << csv_quote(r.commenter_id) << ',' << csv_quote(r.comment_id) << ','
                << (r.timestamp ? format_rfc3339(*r.timestamp) : std::string()) << ','
                << (r.text ? csv_quote(*r.text) : std::string()) << '\n';
        }
    }
}

ChannelDataset FileCommentSource::fetch_channel(const std::string& channel_id) {
    auto it = corpus_.channels.find(channel_id);
    if (it == corpus_.channels.end()) throw UnknownChannelError(channel_id);
    return it->second;
}

std::vector<std::string> FileCommentSource::channel_ids() const {
    std::vector<std::string> ids;
    ids.reserve(corpus_.channels.size());
    for (const auto& [id, ch] : corpus_.channels) ids.push_back(id);
    return ids;
}

}  // namespace mobscope
