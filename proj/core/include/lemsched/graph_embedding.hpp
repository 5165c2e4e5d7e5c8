#pragma once

// Per-link graph features as regularized Laplacians.
//
// Node convention (0-based): node 2q is the transmitter of pair q, node 2q+1
// its receiver, so every matrix here is 2K x 2K. Edges run transmitter ->
// receiver with +1 at the source and -1 at the destination.

#include <cstddef>
#include <vector>

#include "lemsched/channel_sim.hpp"
#include "lemsched/matrix.hpp"
#include "lemsched/spd_geometry.hpp"

namespace lemsched {

enum class WeightNormalization { none, divide_by_field_length };

/// Node numbering used when embedding link q.
///  absolute:     pair i occupies nodes (2i, 2i+1) as in the layout.
///  link_centric: pairs are relabeled so that q becomes pair 0 and the
///                others follow by increasing d(tx_i, rx_q) + d(tx_q, rx_i).
///                Embeddings of different links then share a node meaning,
///                which the Log-Euclidean kernel (an entrywise comparison
///                in the log domain) relies on.
enum class NodeOrder { absolute, link_centric };

struct EmbeddingConfig {
    double gamma_reg = 1e-2;
    WeightNormalization weight_normalization = WeightNormalization::divide_by_field_length;
    NodeOrder node_order = NodeOrder::link_centric;

    void validate() const;
};

inline constexpr std::size_t tx_node(std::size_t q) noexcept { return 2 * q; }
inline constexpr std::size_t rx_node(std::size_t q) noexcept { return 2 * q + 1; }

struct Edge {
    std::size_t source;  // node index, transmitter side
    std::size_t target;  // node index, receiver side
    double weight;
};

/// Node x edge matrix with one +1 and one -1 per column.
class IncidenceMatrix {
public:
    IncidenceMatrix(std::size_t nodes, const std::vector<Edge>& edges);

    std::size_t nodes() const noexcept { return entries_.rows(); }
    std::size_t edge_count() const noexcept { return entries_.cols(); }
    const Matrix& entries() const noexcept { return entries_; }

private:
    Matrix entries_;
};

/// Edge list of one of the three per-link graphs, with weights already
/// normalized according to the config.
struct LinkGraph {
    std::size_t nodes = 0;
    std::vector<Edge> edges;

    IncidenceMatrix incidence() const { return IncidenceMatrix(nodes, edges); }
    Matrix weight_matrix() const;
    /// A W A^T.
    SymMatrix laplacian() const;
};

/// Direct link tx_q -> rx_q.
LinkGraph graph_com(const Layout& layout, std::size_t q, WeightNormalization norm = WeightNormalization::none);
/// Interference received at rx_q: tx_i -> rx_q for all i != q.
LinkGraph graph_int(const Layout& layout, std::size_t q, WeightNormalization norm = WeightNormalization::none);
/// Neighbor direct links tx_i -> rx_i plus interference caused tx_q -> rx_i, i != q.
LinkGraph graph_nbr(const Layout& layout, std::size_t q, WeightNormalization norm = WeightNormalization::none);

SymMatrix laplacian_com(const Layout& layout, std::size_t q, WeightNormalization norm = WeightNormalization::none);
SymMatrix laplacian_int(const Layout& layout, std::size_t q, WeightNormalization norm = WeightNormalization::none);
SymMatrix laplacian_nbr(const Layout& layout, std::size_t q, WeightNormalization norm = WeightNormalization::none);

struct LinkEmbedding {
    std::size_t pair_index = 0;
    SpdMatrix s_com;
    SpdMatrix s_int;
    SpdMatrix s_nbr;
    SpdMatrix s_dq;  // s_com + s_int + s_nbr
};

/// Pair order used by NodeOrder::link_centric for link q (q first).
std::vector<std::size_t> link_centric_order(const Layout& layout, std::size_t q);

/// Layout whose pair k is pair order[k] of the input.
Layout relabel_pairs(const Layout& layout, const std::vector<std::size_t>& order);

/// Each Laplacian shifted by gamma_reg * I, then summed. The returned
/// pair_index is always q; under link_centric the matrices are expressed in
/// the relabeled node order.
LinkEmbedding embed_link(const Layout& layout, std::size_t q, const EmbeddingConfig& cfg);
std::vector<LinkEmbedding> embed_layout(const Layout& layout, const EmbeddingConfig& cfg);

}  // namespace lemsched
