#include "lexqa/commands.hpp"

#include "lexqa/binary_io.hpp"
#include "lexqa/corpus.hpp"
#include "lexqa/embedding.hpp"
#include "lexqa/entailment.hpp"
#include "lexqa/error.hpp"
#include "lexqa/evaluation.hpp"
#include "lexqa/fusion.hpp"
#include "lexqa/lexical_index.hpp"
#include "lexqa/run_config.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace lexqa::cli {

namespace {

/// Raised for unusable command-line input before any module runs.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& flag, const std::string& path) {
    if (path.empty()) throw UsageError(flag + " is required");
    if (!fs::exists(path)) throw UsageError(flag + ": path does not exist: " + path);
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("--out: cannot create directory " + dir.string());
}

void prepare_out_file(const fs::path& file) {
    if (file.has_parent_path()) prepare_out_dir(file.parent_path());
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
    std::ostringstream buf;
    fn(buf);
    io::write_text_file(path, buf.str());
}

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    bool hyphen_split = false;
    std::string stemmer;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "run configuration JSON");
    cmd->add_option("--seed", c.seed, "seed for every random choice");
    cmd->add_flag("--split-hyphens", c.hyphen_split, "split hyphenated words");
    cmd->add_option("--stemmer", c.stemmer, "none | snowball");
}

RunConfig resolve_config(const Common& c) {
    RunConfig config;
    if (!c.config_path.empty()) {
        require_file("--config", c.config_path);
        config = load_run_config(c.config_path);
    }
    if (c.seed) {
        config.seed = *c.seed;
        config.embedding.seed = *c.seed;
    }
    if (c.k) config.k = *c.k;
    if (c.hyphen_split) config.analyzer.split_hyphens = true;
    if (!c.stemmer.empty()) config.analyzer.stemmer = stemmer_from_string(c.stemmer);
    config.gate.normalization = config.analyzer;
    if (config.k == 0) throw Error(ErrorCode::InvalidArgument, "--k must be at least 1");
    return config;
}

// split -----------------------------------------------------------------------------------------

struct SplitArgs {
    std::string input;
    std::string out;
};

void cmd_split(const SplitArgs& a) {
    require_file("--input", a.input);
    if (a.out.empty()) throw UsageError("--out is required");
    prepare_out_file(a.out);
    const auto corpus = split_statute(io::read_text_file(a.input), {}, fs::path(a.input).filename().string());
    write_file(a.out, [&](std::ostream& o) { write_corpus_jsonl(corpus, o); });
    spdlog::info("split {} into {} articles -> {}", a.input, corpus.size(), a.out);
}

// index -----------------------------------------------------------------------------------------

struct IndexArgs {
    Common common;
    std::string corpus;
    std::string out;
};

void cmd_index(const IndexArgs& a) {
    require_file("--corpus", a.corpus);
    if (a.out.empty()) throw UsageError("--out is required");
    const auto config = resolve_config(a.common);
    prepare_out_dir(a.out);
    const auto corpus = load_corpus(a.corpus);
    const auto index = build_index(corpus, config.analyzer, config.bm25);
    index.save(a.out);
    spdlog::info("indexed {} articles ({} terms) -> {}", index.doc_count(), index.postings().size(), a.out);
}

// train-embeddings ------------------------------------------------------------------------------

struct TrainArgs {
    Common common;
    std::string corpus;
    std::string aux_corpus;
    std::string stages;
    std::string out;
    std::optional<std::size_t> dim, window, epochs, negative, min_count;
    std::optional<double> learning_rate;
};

struct Stage {
    std::string path;
    std::size_t epochs = 0;
    std::string flag = "--stages";
};

std::vector<Stage> parse_stages(const std::string& schedule) {
    std::vector<Stage> stages;
    std::stringstream ss(schedule);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos || colon == 0)
            throw UsageError("--stages expects path:epochs[,path:epochs...], got '" + item + "'");
        const auto count = item.substr(colon + 1);
        std::size_t epochs = 0;
        auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), epochs);
        if (count.empty() || ec != std::errc() || ptr != count.data() + count.size() || epochs == 0)
            throw UsageError("--stages: epochs must be a positive integer in '" + item + "'");
        stages.push_back({item.substr(0, colon), epochs, "--stages"});
    }
    if (stages.empty()) throw UsageError("--stages is empty");
    return stages;
}

/// Corpus JSONL yields one text per article, raw text one per non-blank line.
std::vector<TokenStream> training_texts(const std::string& path, const AnalyzerConfig& analyzer) {
    std::vector<TokenStream> texts;
    if (fs::path(path).extension() == ".jsonl") {
        for (const auto& a : load_corpus(path).articles()) texts.push_back(tokenize(article_text(a), analyzer));
        return texts;
    }
    std::istringstream in(normalize_line_endings(io::read_text_file(path)));
    for (std::string line; std::getline(in, line);) {
        auto t = tokenize(line, analyzer);
        if (!t.tokens.empty()) texts.push_back(std::move(t));
    }
    return texts;
}

void cmd_train(const TrainArgs& a) {
    if (a.out.empty()) throw UsageError("--out is required");
    auto config = resolve_config(a.common);
    auto& cbow = config.embedding;
    if (a.dim) cbow.dim = *a.dim;
    if (a.window) cbow.window = *a.window;
    if (a.epochs) cbow.epochs = *a.epochs;
    if (a.negative) cbow.negative = *a.negative;
    if (a.min_count) cbow.min_count = *a.min_count;
    if (a.learning_rate) cbow.learning_rate = *a.learning_rate;

    std::vector<Stage> stages;
    if (!a.stages.empty()) {
        stages = parse_stages(a.stages);
    } else {
        if (a.corpus.empty()) throw UsageError("--corpus or --stages is required");
        // auxiliary corpus first, then the target corpus
        if (!a.aux_corpus.empty()) stages.push_back({a.aux_corpus, a.epochs.value_or(700), "--aux-corpus"});
        stages.push_back({a.corpus, a.epochs.value_or(a.aux_corpus.empty() ? cbow.epochs : 800), "--corpus"});
    }
    for (const auto& s : stages) require_file(s.flag, s.path);
    prepare_out_file(a.out);

    EmbeddingModel model;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        auto stage_config = cbow;
        stage_config.epochs = stages[i].epochs;
        stage_config.seed = cbow.seed + i;
        const auto texts = training_texts(stages[i].path, config.analyzer);
        spdlog::info("stage {}/{}: {} for {} epochs ({} texts)", i + 1, stages.size(), stages[i].path,
                     stages[i].epochs, texts.size());
        const auto report = continue_cbow(model, texts, stage_config);
        spdlog::info("stage {}/{} done: vocab {} (+{}), loss {} -> {}", i + 1, stages.size(), model.vocab_size(),
                     report.new_words, report.epoch_loss.empty() ? 0.0 : report.epoch_loss.front(),
                     report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back());
    }
    save_vectors(model, a.out);
    spdlog::info("wrote {} vectors of dim {} -> {}", model.vocab_size(), model.dim(), a.out);
}

// retrieve --------------------------------------------------------------------------------------

struct RetrieveArgs {
    Common common;
    std::string corpus, vectors, queries, index, out;
    std::string tiers = "default";
};

void cmd_retrieve(const RetrieveArgs& a) {
    require_file("--corpus", a.corpus);
    require_file("--vectors", a.vectors);
    require_file("--queries", a.queries);
    if (!a.index.empty()) require_file("--index", a.index);
    if (a.out.empty()) throw UsageError("--out is required");
    auto config = resolve_config(a.common);
    if (a.tiers == "high-only") {
        config.tiers.resize(1);
    } else if (a.tiers != "default") {
        throw UsageError("--tiers must be 'default' or 'high-only'");
    }
    validate_tiers(config.tiers);
    prepare_out_dir(a.out);

    const auto corpus = load_corpus(a.corpus);
    auto queries = load_queries(a.queries);
    check_gold_ids(queries, corpus);
    std::sort(queries.begin(), queries.end(), [](const auto& x, const auto& y) { return x.qid < y.qid; });

    const auto index = a.index.empty() ? build_index(corpus, config.analyzer, config.bm25) : InvertedIndex::load(a.index);
    if (index.article_ids().size() != corpus.size() ||
        !std::equal(index.article_ids().begin(), index.article_ids().end(), corpus.articles().begin(),
                    [](const std::string& id, const Article& art) { return id == art.id; }))
        throw Error(ErrorCode::UnknownArticle, "index articles do not match the corpus");
    const auto& analyzer = index.analyzer();
    const auto model = load_vectors(a.vectors);
    const auto store = CentroidStore::build(corpus, analyzer, model, index.idf());
    store.save(fs::path(a.out) / "centroids");

    std::vector<RunEntry> run;
    Rankings rankings;
    std::size_t fallbacks = 0;
    for (const auto& q : queries) {
        const auto tokens = tokenize(q.text, analyzer);
        const auto bm25 = index.search(tokens, config.k);
        auto emb = search_embedding(tokens, store, model, index.idf(), config.k);
        // Pairs without a defined similarity are not evidence; keep them out of fusion and the ranking.
        const bool query_defined = idf_centroid(tokens, model, index.idf()).has_value();
        std::erase_if(emb, [&](const ScoredHit& h) { return !query_defined || store.all_oov(h.ordinal); });
        FusionResult fused;
        try {
            fused = fuse(bm25, emb, std::max<std::size_t>(1, tokens.tokens.size()), config.tiers);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoCandidates) throw;
            spdlog::warn("{}: {}", q.qid, e.what());
            continue;
        }
        fallbacks += fused.used_fallback ? 1 : 0;
        auto& ranked = rankings[q.qid];
        std::set<std::string> seen;
        for (const auto& acc : fused.accepted) {
            run.push_back({q.qid, acc.article_id, acc.tier, acc.source, acc.score});
            if (seen.insert(acc.article_id).second) ranked.push_back(acc.article_id);
        }
        auto append = [&](const std::vector<ScoredHit>& list) {
            for (const auto& h : list)
                if (ranked.size() < config.k && seen.insert(h.article_id).second) ranked.push_back(h.article_id);
        };
        append(bm25);
        append(emb);
    }
    write_file(fs::path(a.out) / "run.tsv", [&](std::ostream& o) { write_run(run, o); });
    write_file(fs::path(a.out) / "ranking.tsv", [&](std::ostream& o) { write_rankings(rankings, o); });
    spdlog::info("retrieved {} acceptances for {} queries ({} by fallback) -> {}", run.size(), queries.size(),
                 fallbacks, a.out);
}

// entail ----------------------------------------------------------------------------------------

struct EntailArgs {
    Common common;
    std::string corpus, queries, votes, out;
    bool baseline = false;
};

void cmd_entail(const EntailArgs& a) {
    require_file("--queries", a.queries);
    if (!a.baseline) {
        require_file("--corpus", a.corpus);
        require_file("--votes", a.votes);
    }
    if (a.out.empty()) throw UsageError("--out is required");
    const auto config = resolve_config(a.common);
    validate_gate(config.gate);
    prepare_out_dir(a.out);

    const auto queries = load_queries(a.queries);
    std::map<std::string, Verdict> decisions;
    if (a.baseline) {
        const auto verdicts = baseline_negative(queries);
        for (std::size_t i = 0; i < queries.size(); ++i) decisions[queries[i].qid] = verdicts[i];
    } else {
        const auto corpus = load_corpus(a.corpus);
        decisions = run_entailment(queries, corpus, load_votes(a.votes), config.gate);
    }
    write_file(fs::path(a.out) / "decisions.tsv", [&](std::ostream& o) { write_decisions(decisions, o); });
    const auto yes = std::count_if(decisions.begin(), decisions.end(),
                                   [](const auto& kv) { return kv.second.decision == Decision::Yes; });
    spdlog::info("{} decisions ({} YES) -> {}", decisions.size(), yes, a.out);
}

// evaluate --------------------------------------------------------------------------------------

struct EvaluateArgs {
    Common common;
    std::string run, gold, ranking, decisions, out;
};

void cmd_evaluate(const EvaluateArgs& a) {
    require_file("--gold", a.gold);
    if (a.run.empty() && a.decisions.empty()) throw UsageError("--run or --decisions is required");
    if (!a.run.empty()) require_file("--run", a.run);
    if (!a.ranking.empty()) require_file("--ranking", a.ranking);
    if (!a.decisions.empty()) require_file("--decisions", a.decisions);
    if (a.out.empty()) throw UsageError("--out is required");
    const auto config = resolve_config(a.common);
    prepare_out_dir(a.out);

    const auto queries = load_queries(a.gold);
    EvaluationReport report;
    if (!a.run.empty()) {
        const auto run = load_run(a.run);
        std::optional<Rankings> rankings;
        if (!a.ranking.empty()) rankings = load_rankings(a.ranking);
        std::set<std::string> known;
        for (const auto& q : queries) known.insert(q.qid);
        for (const auto& e : run)
            if (!known.contains(e.qid)) throw Error(ErrorCode::MissingLabel, "run has unknown qid " + e.qid);
        report.retrieval = evaluate_retrieval(run, queries, rankings);

        std::vector<std::string> names;
        for (const auto& t : config.tiers) names.push_back(t.name);
        for (const auto& e : run)
            if (e.tier != kFallbackTier && std::find(names.begin(), names.end(), e.tier) == names.end())
                names.push_back(e.tier);
        report.tiers = tier_coverage_report(run, queries, names);
    }
    if (!a.decisions.empty()) {
        const auto decisions = load_decisions(a.decisions);
        report.accuracy = entailment_accuracy(decisions, queries);
        report.decisions = decisions.size();
    }
    write_file(fs::path(a.out) / "report.tsv", [&](std::ostream& o) { write_report_tsv(report, o); });
    write_file(fs::path(a.out) / "report.md", [&](std::ostream& o) { write_report_markdown(report, o); });
    if (report.retrieval)
        spdlog::info("F2 {} P {} R {} over {} queries", percent(report.retrieval->macro.f2),
                     percent(report.retrieval->macro.precision), percent(report.retrieval->macro.recall),
                     report.retrieval->queries);
    if (report.accuracy) spdlog::info("entailment accuracy {}", percent(*report.accuracy));
}

void configure_logging(const std::string& level) {
    static auto logger = [] {
        auto l = spdlog::stderr_logger_st("lexqa");
        l->set_pattern("[%l] %v");
        return l;
    }();
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Statute retrieval and entailment pipeline"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    SplitArgs split;
    auto* c_split = app.add_subcommand("split", "split a statute text into corpus JSONL");
    c_split->add_option("--input", split.input, "statute text file");
    c_split->add_option("--out", split.out, "corpus JSONL to write");

    IndexArgs idx;
    auto* c_index = app.add_subcommand("index", "build the BM25 index");
    c_index->add_option("--corpus", idx.corpus, "corpus (.jsonl or statute text)");
    c_index->add_option("--out", idx.out, "index directory");
    add_common(c_index, idx.common);

    TrainArgs train;
    auto* c_train = app.add_subcommand("train-embeddings", "train CBOW word vectors");
    c_train->add_option("--corpus", train.corpus, "target corpus, trained last");
    c_train->add_option("--aux-corpus", train.aux_corpus, "auxiliary corpus, trained first");
    c_train->add_option("--stages", train.stages, "explicit schedule path:epochs[,path:epochs...]");
    c_train->add_option("--out,--vectors", train.out, "vector file to write (word2vec text format)");
    c_train->add_option("--dim", train.dim);
    c_train->add_option("--window", train.window);
    c_train->add_option("--epochs", train.epochs);
    c_train->add_option("--negative", train.negative);
    c_train->add_option("--min-count", train.min_count);
    c_train->add_option("--lr", train.learning_rate);
    add_common(c_train, train.common);

    RetrieveArgs ret;
    auto* c_ret = app.add_subcommand("retrieve", "rank, fuse and write the retrieval run");
    c_ret->add_option("--corpus", ret.corpus);
    c_ret->add_option("--vectors", ret.vectors);
    c_ret->add_option("--queries", ret.queries);
    c_ret->add_option("--index", ret.index, "prebuilt index directory (built on the fly otherwise)");
    c_ret->add_option("--out", ret.out, "output directory");
    c_ret->add_option("--tiers", ret.tiers, "default | high-only");
    c_ret->add_option("--k", ret.common.k, "hits kept per ranked list");
    add_common(c_ret, ret.common);

    EntailArgs ent;
    auto* c_ent = app.add_subcommand("entail", "decide entailment per query");
    c_ent->add_option("--corpus", ent.corpus);
    c_ent->add_option("--queries", ent.queries);
    c_ent->add_option("--votes", ent.votes, "ensemble vote JSONL");
    c_ent->add_option("--out", ent.out, "output directory");
    c_ent->add_flag("--baseline", ent.baseline, "answer NO for every query");
    add_common(c_ent, ent.common);

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "score a run and/or entailment decisions");
    c_ev->add_option("--run", ev.run, "run TSV");
    c_ev->add_option("--gold,--queries", ev.gold, "queries with gold articles and labels");
    c_ev->add_option("--ranking", ev.ranking, "ranking TSV for MAP and R@k");
    c_ev->add_option("--decisions", ev.decisions, "decision TSV");
    c_ev->add_option("--out", ev.out, "output directory");
    add_common(c_ev, ev.common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return kOk;
        }
        std::ostringstream err;
        app.exit(e, err, err);
        configure_logging("info");
        spdlog::error("{}", err.str().empty() ? e.what() : err.str());
        return kInputError;
    }
    configure_logging(log_level);

    try {
        if (*c_split) cmd_split(split);
        else if (*c_index) cmd_index(idx);
        else if (*c_train) cmd_train(train);
        else if (*c_ret) cmd_retrieve(ret);
        else if (*c_ent) cmd_entail(ent);
        else if (*c_ev) cmd_evaluate(ev);
        return kOk;
    } catch (const UsageError& e) {
        spdlog::error("{}", e.what());
        return kInputError;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        switch (classify(e.code())) {
            case ErrorClass::Input: return kInputError;
            case ErrorClass::DataConsistency: return kDataError;
            case ErrorClass::Invariant: return kInternalError;
        }
        return kInternalError;
    } catch (const fs::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return kInputError;
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return kInternalError;
    }
}

}  // namespace lexqa::cli
