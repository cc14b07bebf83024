#include "lexqa/corpus.hpp"

#include "lexqa/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace lexqa {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\f' || c == '\v' || c == '\r';
    });
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

std::string_view ltrim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct HeaderMatch {
    std::string id;
    std::size_t length = 0;  // bytes consumed by the header on its line
};

class HeaderMatcher {
  public:
    explicit HeaderMatcher(const SplitRules& rules) {
        if (rules.header_patterns.empty())
            throw Error(ErrorCode::InvalidArgument, "split rules need at least one header pattern");
        for (const auto& p : rules.header_patterns) headers_.emplace_back("^(?:" + p + ")");
        if (!rules.title_pattern.empty()) title_.emplace("^(?:" + rules.title_pattern + ")$");
    }

    std::optional<HeaderMatch> header(std::string_view line) const {
        for (const auto& re : headers_) {
            std::match_results<std::string_view::const_iterator> m;
            if (std::regex_search(line.begin(), line.end(), m, re)) {
                return HeaderMatch{collapse_whitespace(m.str(0)),
                                   static_cast<std::size_t>(m.length(0))};
            }
        }
        return std::nullopt;
    }

    std::optional<std::string> title(std::string_view line) const {
        if (!title_) return std::nullopt;
        std::match_results<std::string_view::const_iterator> m;
        if (!std::regex_match(line.begin(), line.end(), m, *title_)) return std::nullopt;
        return collapse_whitespace(m.size() > 1 && m[1].matched ? m.str(1) : m.str(0));
    }

  private:
    std::vector<std::regex> headers_;
    std::optional<std::regex> title_;
};

Article article_from_json(const json& j, std::size_t line_no) {
    auto field = [&](const char* name) -> const json& {
        auto it = j.find(name);
        if (it == j.end())
            throw Error(ErrorCode::MissingField,
                        std::string(name) + " (line " + std::to_string(line_no) + ")");
        return *it;
    };
    Article a;
    try {
        a.id = field("id").get<std::string>();
        a.body = field("body").get<std::string>();
        a.ordinal = field("ordinal").get<std::size_t>();
        if (auto it = j.find("title"); it != j.end() && !it->is_null())
            a.title = it->get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    return a;
}

std::string decode_xml_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos) {
            out.push_back('&');
            continue;
        }
        auto name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else {
            out.append(s.substr(i, semi - i + 1));
        }
        i = semi;
    }
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> xml_attribute(std::string_view tag, std::string_view name) {
    std::size_t pos = 0;
    while ((pos = tag.find(name, pos)) != std::string_view::npos) {
        bool boundary = pos == 0 || std::isspace(static_cast<unsigned char>(tag[pos - 1]));
        auto eq = tag.find_first_not_of(" \t\r\n", pos + name.size());
        if (boundary && eq != std::string_view::npos && tag[eq] == '=') {
            auto q = tag.find_first_not_of(" \t\r\n", eq + 1);
            if (q == std::string_view::npos || (tag[q] != '"' && tag[q] != '\'')) return std::nullopt;
            auto close = tag.find(tag[q], q + 1);
            if (close == std::string_view::npos) return std::nullopt;
            return decode_xml_entities(tag.substr(q + 1, close - q - 1));
        }
        pos += name.size();
    }
    return std::nullopt;
}

std::optional<std::string> xml_element(std::string_view block, std::string_view name) {
    const std::string open = "<" + std::string(name) + ">";
    const std::string close = "</" + std::string(name) + ">";
    auto b = block.find(open);
    if (b == std::string_view::npos) return std::nullopt;
    auto e = block.find(close, b + open.size());
    if (e == std::string_view::npos) return std::nullopt;
    return decode_xml_entities(block.substr(b + open.size(), e - b - open.size()));
}

std::vector<QueryRecord> parse_queries_jsonl(std::istream& in) {
    std::vector<QueryRecord> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": not an object");
        QueryRecord q;
        try {
            if (!j.contains("qid"))
                throw Error(ErrorCode::MissingField, "qid (line " + std::to_string(line_no) + ")");
            if (!j.contains("text"))
                throw Error(ErrorCode::MissingField, "text (line " + std::to_string(line_no) + ")");
            q.qid = j.at("qid").get<std::string>();
            q.text = j.at("text").get<std::string>();
            if (auto it = j.find("gold"); it != j.end() && !it->is_null()) {
                for (const auto& g : *it) q.gold_article_ids.insert(g.get<std::string>());
            }
            if (auto it = j.find("label"); it != j.end() && !it->is_null())
                q.gold_entailment = it->get<bool>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (q.qid.empty() || is_blank(q.text))
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": empty qid or text");
        if (!seen.insert(q.qid).second)
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": duplicate qid " + q.qid);
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<QueryRecord> parse_queries_xml(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string doc = normalize_line_endings(ss.str());
    const HeaderMatcher matcher{SplitRules{}};

    std::vector<QueryRecord> out;
    std::set<std::string> seen;
    std::size_t pos = 0;
    std::size_t record = 0;
    while ((pos = doc.find("<pair", pos)) != std::string::npos) {
        auto tag_end = doc.find('>', pos);
        auto pair_end = doc.find("</pair>", pos);
        if (tag_end == std::string::npos || pair_end == std::string::npos)
            throw Error(ErrorCode::ParseError, "record " + std::to_string(record) + ": unterminated <pair>");
        std::string_view tag(doc.data() + pos, tag_end - pos);
        std::string_view block(doc.data() + tag_end + 1, pair_end - tag_end - 1);

        QueryRecord q;
        auto id = xml_attribute(tag, "id");
        if (!id) throw Error(ErrorCode::MissingField, "id (record " + std::to_string(record) + ")");
        q.qid = *id;
        auto t2 = xml_element(block, "t2");
        if (!t2) throw Error(ErrorCode::MissingField, "t2 (record " + std::to_string(record) + ")");
        q.text = trim(*t2);
        if (q.text.empty())
            throw Error(ErrorCode::ParseError, "record " + std::to_string(record) + ": empty t2");
        if (auto label = xml_attribute(tag, "label")) {
            if (*label == "Y") q.gold_entailment = true;
            else if (*label == "N") q.gold_entailment = false;
            else
                throw Error(ErrorCode::ParseError,
                            "record " + std::to_string(record) + ": label must be Y or N");
        }
        if (auto t1 = xml_element(block, "t1")) {
            for (auto line : split_lines(*t1)) {
                if (auto h = matcher.header(ltrim(line))) q.gold_article_ids.insert(h->id);
            }
        }
        if (!seen.insert(q.qid).second)
            throw Error(ErrorCode::ParseError,
                        "record " + std::to_string(record) + ": duplicate qid " + q.qid);
        out.push_back(std::move(q));
        pos = pair_end + 7;
        ++record;
    }
    return out;
}

}  // namespace

std::string article_text(const Article& article) {
    if (!article.title) return article.body;
    return *article.title + "\n" + article.body;
}

Corpus::Corpus(std::vector<Article> articles, std::string source_name)
    : articles_(std::move(articles)), source_name_(std::move(source_name)) {
    by_id_.reserve(articles_.size());
    for (std::size_t i = 0; i < articles_.size(); ++i) {
        const auto& a = articles_[i];
        if (a.id.empty()) throw Error(ErrorCode::ParseError, "article with empty id");
        if (is_blank(a.body) ||
            std::all_of(a.body.begin(), a.body.end(),
                        [](unsigned char c) { return std::isspace(c); }))
            throw Error(ErrorCode::ParseError, "article " + a.id + " has an empty body");
        if (a.ordinal != i)
            throw Error(ErrorCode::ParseError,
                        "article " + a.id + " has ordinal " + std::to_string(a.ordinal) +
                            ", expected " + std::to_string(i));
        if (!by_id_.emplace(a.id, i).second)
            throw Error(ErrorCode::DuplicateArticleId, a.id);
    }
}

const Article& Corpus::at(std::size_t ordinal) const {
    if (ordinal >= articles_.size())
        throw Error(ErrorCode::OrdinalOutOfRange,
                    std::to_string(ordinal) + " >= " + std::to_string(articles_.size()));
    return articles_[ordinal];
}

const Article* Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &articles_[it->second];
}

std::string normalize_line_endings(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

Corpus split_statute(std::string_view raw_text, const SplitRules& rules, std::string source_name) {
    const HeaderMatcher matcher(rules);
    const std::string text = normalize_line_endings(raw_text);
    const auto lines = split_lines(text);

    struct Pending {
        Article article;
        std::vector<std::string_view> body_lines;
    };
    std::vector<Pending> pending;
    std::set<std::string> ids;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = lines[i];
        auto header = matcher.header(line);
        if (!header) {
            if (!pending.empty() && !is_blank(line)) pending.back().body_lines.push_back(line);
            continue;
        }
        if (!ids.insert(header->id).second) throw Error(ErrorCode::DuplicateArticleId, header->id);

        Pending p;
        p.article.id = header->id;
        p.article.ordinal = pending.size();
        if (i > 0 && !matcher.header(lines[i - 1])) {
            if (auto title = matcher.title(lines[i - 1])) {
                p.article.title = *title;
                // the title line was provisionally taken as body of the previous article
                if (!pending.empty() && !pending.back().body_lines.empty() &&
                    pending.back().body_lines.back().data() == lines[i - 1].data())
                    pending.back().body_lines.pop_back();
            }
        }
        auto rest = ltrim(line.substr(header->length));
        if (!is_blank(rest)) p.body_lines.push_back(rest);
        pending.push_back(std::move(p));
    }

    if (pending.empty()) throw Error(ErrorCode::NoArticlesFound, "no article header matched");

    std::vector<Article> articles;
    articles.reserve(pending.size());
    for (auto& p : pending) {
        std::string body;
        for (std::size_t k = 0; k < p.body_lines.size(); ++k) {
            if (k) body.push_back('\n');
            body.append(p.body_lines[k]);
        }
        if (body.empty())
            throw Error(ErrorCode::ParseError, "article " + p.article.id + " has an empty body");
        p.article.body = std::move(body);
        articles.push_back(std::move(p.article));
    }
    return Corpus(std::move(articles), std::move(source_name));
}

std::string serialize_statute(const Corpus& corpus) {
    std::string out;
    for (const auto& a : corpus.articles()) {
        if (!out.empty()) out.push_back('\n');
        if (a.title) out += "(" + *a.title + ")\n";
        out += a.id + "\n" + a.body + "\n";
    }
    return out;
}

Corpus read_corpus_jsonl(std::istream& in, std::string source_name) {
    std::vector<Article> articles;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
        articles.push_back(article_from_json(j, line_no));
    }
    if (articles.empty()) throw Error(ErrorCode::NoArticlesFound, "corpus file has no records");
    return Corpus(std::move(articles), std::move(source_name));
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const auto& a : corpus.articles()) {
        ordered_json j;
        j["id"] = a.id;
        j["title"] = a.title ? ordered_json(*a.title) : ordered_json(nullptr);
        j["body"] = a.body;
        j["ordinal"] = a.ordinal;
        out << j.dump() << '\n';
    }
}

Corpus load_corpus(const std::filesystem::path& path, const SplitRules& rules) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "no such file: " + path.string());
    if (path.extension() == ".jsonl") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
        return read_corpus_jsonl(in, path.filename().string());
    }
    return split_statute(read_file(path), rules, path.filename().string());
}

std::vector<QueryRecord> parse_queries(std::istream& in, QueryFormat format) {
    return format == QueryFormat::Jsonl ? parse_queries_jsonl(in) : parse_queries_xml(in);
}

std::vector<QueryRecord> load_queries(const std::filesystem::path& path, QueryFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return parse_queries(in, format);
}

std::vector<QueryRecord> load_queries(const std::filesystem::path& path) {
    return load_queries(path, path.extension() == ".xml" ? QueryFormat::PairXml : QueryFormat::Jsonl);
}

void write_queries_jsonl(const std::vector<QueryRecord>& queries, std::ostream& out) {
    for (const auto& q : queries) {
        ordered_json j;
        j["qid"] = q.qid;
        j["text"] = q.text;
        j["gold"] = q.gold_article_ids;
        if (q.gold_entailment) j["label"] = *q.gold_entailment;
        out << j.dump() << '\n';
    }
}

void save_queries(const std::vector<QueryRecord>& queries, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_queries_jsonl(queries, out);
}

void check_gold_ids(const std::vector<QueryRecord>& queries, const Corpus& corpus) {
    for (const auto& q : queries)
        for (const auto& id : q.gold_article_ids)
            if (!corpus.find(id))
                throw Error(ErrorCode::UnknownArticle, q.qid + " references " + id);
}

}  // namespace lexqa
