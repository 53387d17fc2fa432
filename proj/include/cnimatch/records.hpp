#pragma once

#include <json.hpp>

#include <string>

#include "cnimatch/filter.hpp"
#include "cnimatch/stream.hpp"
#include "cnimatch/workload.hpp"

namespace cni {

// Line-delimited records with fixed field names, so runs diff cleanly.

inline nlohmann::json match_record(const std::string& query_id, const std::string& filter_mode,
                                   const FilterStats& stats, std::uint64_t embeddings,
                                   double elapsed_ms) {
    return nlohmann::json{{"record", "match"},
                          {"query_id", query_id},
                          {"filter_mode", filter_mode},
                          {"iterations", stats.iterations},
                          {"pruned_label", stats.pruned_label},
                          {"pruned_degree", stats.pruned_degree},
                          {"pruned_cni", stats.pruned_cni},
                          {"pruned_qhop", stats.pruned_qhop},
                          {"candidates_per_vertex", stats.candidate_set_sizes},
                          {"embeddings", embeddings},
                          {"elapsed_ms", elapsed_ms}};
}

inline nlohmann::json dataset_record(const std::string& name, const DatasetStats& s) {
    return nlohmann::json{{"record", "dataset"},
                          {"name", name},
                          {"vertices", s.vertices},
                          {"edges", s.edges},
                          {"labels", s.labels},
                          {"avg_degree", s.avg_degree}};
}

inline nlohmann::json stream_record(const StreamStats& s, std::size_t retained_vertices,
                                    std::size_t retained_edges) {
    return nlohmann::json{{"record", "stream"},
                          {"mode", s.sorted ? "sorted" : "unsorted"},
                          {"degraded", s.degraded()},
                          {"edges_read", s.edges_read},
                          {"vertices_admitted", s.vertices_admitted},
                          {"vertices_dropped", s.vertices_dropped},
                          {"label_rejected", s.label_rejected},
                          {"peak_retained_edges", s.peak_retained_edges},
                          {"retained_vertices", retained_vertices},
                          {"retained_edges", retained_edges}};
}

inline nlohmann::json bench_record(const QueryBenchRecord& rec) {
    nlohmann::json j = match_record(rec.query_id, rec.filter_mode, rec.stats, rec.embeddings,
                                    rec.total_ms);
    j["record"] = "bench";
    j["filter_ms"] = rec.filter_ms;
    j["search_ms"] = rec.search_ms;
    j["total_candidates"] = rec.total_candidates;
    return j;
}

inline nlohmann::json bench_aggregate_record(const BenchAggregate& agg) {
    return nlohmann::json{{"record", "bench_aggregate"},
                          {"filter_mode", agg.filter_mode},
                          {"queries", agg.queries},
                          {"mean_total_ms", agg.mean_total_ms},
                          {"mean_filter_ms", agg.mean_filter_ms},
                          {"mean_search_ms", agg.mean_search_ms},
                          {"mean_candidates", agg.mean_candidates},
                          {"mean_embeddings", agg.mean_embeddings}};
}

}  // namespace cni
