#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cnimatch/filter.hpp"
#include "cnimatch/graph.hpp"
#include "cnimatch/records.hpp"
#include "cnimatch/search.hpp"
#include "cnimatch/stream.hpp"
#include "cnimatch/workload.hpp"

namespace {

struct Options {
    std::string data_path;
    std::string stream_path;
    std::vector<std::string> query_paths;
    std::string queries_dir;
    std::string filter_name = "cni";
    unsigned qhops = 1;
    unsigned packet_size = 0;
    std::string order_name = "least-candidates";
    std::uint64_t limit = 0;
    bool count_only = false;
    std::string stats_out;
    std::uint64_t seed = 0;
    bool parallel = false;
    bool directed = false;
    std::string out_path;
    std::string out_dir;
    unsigned size = 4;
    unsigned count = 1;
    std::string walk_mode = "sparse";
    std::string configs = "label-degree,cni";
};

cni::FilterMode parse_filter(const std::string& name) {
    if (name == "none") return cni::FilterMode::None;
    if (name == "label-degree") return cni::FilterMode::LabelDegree;
    if (name == "nlf-mnd") return cni::FilterMode::NlfMnd;
    if (name == "cni") return cni::FilterMode::Cni;
    throw CLI::ValidationError("--filter", "expected one of none|label-degree|nlf-mnd|cni");
}

cni::OrderPolicy parse_order(const std::string& name) {
    if (name == "input") return cni::OrderPolicy::InputOrder;
    if (name == "least-candidates") return cni::OrderPolicy::LeastCandidatesConnected;
    throw CLI::ValidationError("--order", "expected input|least-candidates");
}

cni::Graph load_graph_file(const std::string& path, bool directed) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    try {
        cni::Graph g = cni::load_graph(in, directed);
        g.set_name(std::filesystem::path(path).stem().string());
        return g;
    } catch (const cni::ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

class RecordSink {
public:
    explicit RecordSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw std::runtime_error("cannot open stats output " + path);
        }
    }
    void emit(const nlohmann::json& j) {
        (file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout) << j.dump() << '\n';
    }

private:
    std::ofstream file_;
};

cni::FilterOptions filter_options(const Options& o) {
    cni::FilterOptions f;
    f.mode = parse_filter(o.filter_name);
    f.qhops = std::max(1u, o.qhops);
    f.packet_size = o.packet_size;
    return f;
}

cni::SearchConfig search_config(const Options& o) {
    cni::SearchConfig s;
    s.order_policy = parse_order(o.order_name);
    if (o.limit > 0) s.embedding_limit = o.limit;
    s.parallel_roots = o.parallel;
    return s;
}

std::vector<std::string> collect_query_paths(const Options& o) {
    std::vector<std::string> paths = o.query_paths;
    if (!o.queries_dir.empty()) {
        std::vector<std::string> found;
        for (const auto& entry : std::filesystem::directory_iterator(o.queries_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".lg")
                found.push_back(entry.path().string());
        std::sort(found.begin(), found.end());
        paths.insert(paths.end(), found.begin(), found.end());
    }
    if (paths.empty())
        throw std::runtime_error("no query files given (use --query or --queries-dir)");
    return paths;
}

void write_graph_file(const cni::Graph& g, const std::string& path,
                      const std::vector<cni::VertexId>* original_ids = nullptr) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output " + path);
    cni::write_graph(g, out);
    if (original_ids)
        for (std::size_t i = 0; i < original_ids->size(); ++i)
            out << "# orig " << i << ' ' << (*original_ids)[i] << '\n';
}

int cmd_match(const Options& o) {
    if (!o.stream_path.empty() && o.directed)
        throw std::runtime_error("--directed cannot be combined with --stream; "
                                 "edge streams are undirected");
    cni::Graph q = load_graph_file(o.query_paths.at(0), o.directed);
    RecordSink sink(o.stats_out);
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t count = 0;
    cni::FilterStats stats;

    auto print_embedding = [&](const cni::Embedding& e) {
        if (!o.count_only)
            std::cout << cni::serialize_embedding(e) << '\n';
        return true;
    };

    if (!o.stream_path.empty()) {
        std::ifstream in(o.stream_path);
        if (!in)
            throw std::runtime_error("cannot open " + o.stream_path);
        cni::ReducedGraph rg = cni::stream_filter(in, q);
        sink.emit(cni::stream_record(rg.stats, rg.graph.vertex_count(), rg.graph.edge_count()));
        cni::FilterResult fr = cni::run_filter(rg.graph, q, filter_options(o));
        cni::enumerate_embeddings(rg.graph, q, fr.candidates, search_config(o),
                                  [&](const cni::Embedding& e) {
                                      ++count;
                                      if (o.count_only) return true;
                                      // report the stream's original vertex ids
                                      for (std::size_t i = 0; i < e.pairs.size(); ++i) {
                                          if (i) std::cout << ' ';
                                          std::cout << 'u' << e.pairs[i].first << ":v"
                                                    << rg.original_ids[e.pairs[i].second];
                                      }
                                      std::cout << '\n';
                                      return true;
                                  });
        stats = fr.state.stats;
    } else {
        cni::Graph g = load_graph_file(o.data_path, o.directed);
        cni::FilterResult fr = cni::run_filter(g, q, filter_options(o));
        cni::enumerate_embeddings(g, q, fr.candidates, search_config(o),
                                  [&](const cni::Embedding& e) {
                                      ++count;
                                      return print_embedding(e);
                                  });
        stats = fr.state.stats;
    }
    if (o.count_only)
        std::cout << count << '\n';
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    sink.emit(cni::match_record(q.name(), o.filter_name, stats, count, ms));
    return 0;
}

int cmd_filter(const Options& o) {
    cni::Graph g = load_graph_file(o.data_path, o.directed);
    cni::Graph q = load_graph_file(o.query_paths.at(0), o.directed);
    RecordSink sink(o.stats_out);
    const auto t0 = std::chrono::steady_clock::now();
    cni::FilterResult fr = cni::run_filter(g, q, filter_options(o));
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    cni::SurvivorSubgraph sub = cni::survivor_subgraph(g, fr.state);
    if (!o.out_path.empty())
        write_graph_file(sub.graph, o.out_path, &sub.original_ids);
    else
        cni::write_graph(sub.graph, std::cout);
    sink.emit(cni::match_record(q.name(), o.filter_name, fr.state.stats, 0, ms));
    return 0;
}

int cmd_stream_filter(const Options& o) {
    cni::Graph q = load_graph_file(o.query_paths.at(0), false);
    std::ifstream in(o.stream_path);
    if (!in)
        throw std::runtime_error("cannot open " + o.stream_path);
    RecordSink sink(o.stats_out);
    cni::ReducedGraph rg = cni::stream_filter(in, q);
    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path);
        if (!out)
            throw std::runtime_error("cannot open output " + o.out_path);
        cni::write_graph(rg.graph, out);
        for (std::size_t i = 0; i < rg.original_ids.size(); ++i)
            out << "# orig " << i << ' ' << rg.original_ids[i] << '\n';
    }
    sink.emit(cni::stream_record(rg.stats, rg.graph.vertex_count(), rg.graph.edge_count()));
    return 0;
}

int cmd_gen_queries(const Options& o) {
    cni::Graph g = load_graph_file(o.data_path, o.directed);
    cni::WorkloadSpec spec;
    spec.query_size = o.size;
    spec.count = o.count;
    spec.mode = o.walk_mode == "dense" ? cni::WalkMode::Dense : cni::WalkMode::Sparse;
    spec.seed = o.seed;
    if (o.walk_mode != "dense" && o.walk_mode != "sparse")
        throw std::runtime_error("--mode must be sparse or dense");
    auto queries = cni::generate_queries(g, spec);
    std::filesystem::create_directories(o.out_dir);
    RecordSink sink(o.stats_out);
    for (const auto& q : queries) {
        const std::string path =
            (std::filesystem::path(o.out_dir) / (q.name() + ".lg")).string();
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open output " + path);
        cni::write_graph(q, out);
        sink.emit(nlohmann::json{{"record", "query"},
                                 {"file", path},
                                 {"vertices", q.vertex_count()},
                                 {"edges", q.edge_count()}});
    }
    return 0;
}

int cmd_stats(const Options& o) {
    cni::Graph g = load_graph_file(o.data_path, o.directed);
    RecordSink sink(o.stats_out);
    sink.emit(cni::dataset_record(g.name(), cni::dataset_stats(g)));
    return 0;
}

int cmd_bench(const Options& o) {
    cni::Graph g = load_graph_file(o.data_path, o.directed);
    std::vector<cni::Graph> queries;
    for (const auto& path : collect_query_paths(o))
        queries.push_back(load_graph_file(path, o.directed));
    std::vector<cni::BenchConfig> configs;
    std::stringstream ss(o.configs);
    std::string name;
    while (std::getline(ss, name, ','))
        if (!name.empty()) configs.push_back(cni::bench_config(name, std::max(2u, o.qhops)));
    RecordSink sink(o.stats_out);
    cni::BenchReport report = cni::run_benchmark(g, queries, configs, search_config(o));
    for (const auto& rec : report.per_query) sink.emit(cni::bench_record(rec));
    for (const auto& agg : report.aggregates) sink.emit(cni::bench_aggregate_record(agg));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subgraph isomorphism search driven by compact neighborhood indexes"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd, bool needs_query) {
        cmd->add_option("--filter", o.filter_name, "filter mode: none|label-degree|nlf-mnd|cni")
            ->capture_default_str();
        cmd->add_option("--qhops", o.qhops, "layered filter depth (>=1)")->capture_default_str();
        cmd->add_option("--packet-size", o.packet_size, "packeted CNI size (0 = off)");
        cmd->add_option("--order", o.order_name, "matching order: input|least-candidates")
            ->capture_default_str();
        cmd->add_option("--limit", o.limit, "stop after this many embeddings");
        cmd->add_flag("--count-only", o.count_only, "print only the embedding count");
        cmd->add_option("--stats-out", o.stats_out, "write stats records to this file");
        cmd->add_option("--seed", o.seed, "random seed");
        cmd->add_flag("--parallel", o.parallel, "explore top-level candidates in parallel");
        cmd->add_flag("--directed", o.directed, "treat graphs as directed");
        if (needs_query)
            cmd->add_option("--query", o.query_paths, "query graph file")->required();
    };

    CLI::App* match = app.add_subcommand("match", "enumerate embeddings of a query");
    match->add_option("--data", o.data_path, "data graph file");
    match->add_option("--stream", o.stream_path, "edge stream file");
    add_common(match, true);

    CLI::App* filter = app.add_subcommand("filter", "filter the data graph, write survivors");
    filter->add_option("--data", o.data_path, "data graph file")->required();
    filter->add_option("--out", o.out_path, "output graph file (default stdout)");
    add_common(filter, true);

    CLI::App* sf = app.add_subcommand("stream-filter", "filter an edge stream, write survivors");
    sf->add_option("--stream", o.stream_path, "edge stream file")->required();
    sf->add_option("--out", o.out_path, "output graph file");
    add_common(sf, true);

    CLI::App* gen = app.add_subcommand("gen-queries", "sample query graphs by random walks");
    gen->add_option("--data", o.data_path, "data graph file")->required();
    gen->add_option("--size", o.size, "query vertex count")->required();
    gen->add_option("--count", o.count, "number of queries")->capture_default_str();
    gen->add_option("--mode", o.walk_mode, "walk mode: sparse|dense")->capture_default_str();
    gen->add_option("--out-dir", o.out_dir, "output directory")->required();
    add_common(gen, false);

    CLI::App* stats = app.add_subcommand("stats", "dataset statistics");
    stats->add_option("--data", o.data_path, "data graph file")->required();
    add_common(stats, false);

    CLI::App* bench = app.add_subcommand("bench", "compare filter configurations");
    bench->add_option("--data", o.data_path, "data graph file")->required();
    bench->add_option("--query", o.query_paths, "query graph file (repeatable)");
    bench->add_option("--queries-dir", o.queries_dir, "directory of .lg query files");
    bench->add_option("--configs", o.configs,
                      "comma list of none|label-degree|nlf-mnd|cni|cni+qhop")
        ->capture_default_str();
    bench->add_option("--qhops", o.qhops, "depth for cni+qhop")->capture_default_str();
    bench->add_option("--order", o.order_name, "matching order")->capture_default_str();
    bench->add_option("--stats-out", o.stats_out, "write stats records to this file");
    bench->add_flag("--parallel", o.parallel, "parallel root exploration");
    bench->add_flag("--directed", o.directed, "treat graphs as directed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*match) {
            if (o.data_path.empty() == o.stream_path.empty())
                throw std::runtime_error("match needs exactly one of --data or --stream");
            return cmd_match(o);
        }
        if (*filter) return cmd_filter(o);
        if (*sf) return cmd_stream_filter(o);
        if (*gen) return cmd_gen_queries(o);
        if (*stats) return cmd_stats(o);
        if (*bench) return cmd_bench(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
