#include "lemsched/graph_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lemsched/error.hpp"

namespace lemsched {

namespace {

void check_pair(const Layout& layout, std::size_t q) {
    if (q >= layout.pair_count())
        throw ValidationError("pair index " + std::to_string(q) + " out of range for K=" +
                              std::to_string(layout.pair_count()));
}

double edge_weight(const Layout& layout, std::size_t i, std::size_t q, WeightNormalization norm) {
    const double d = layout.link_distance(i, q);
    return norm == WeightNormalization::divide_by_field_length ? d / layout.config.field_length : d;
}

SpdMatrix shifted(const SymMatrix& l, double gamma) {
    Matrix m = l.matrix();
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += gamma;
    return SpdMatrix(std::move(m));
}

}  // namespace

void EmbeddingConfig::validate() const {
    if (!(gamma_reg > 0.0) || !std::isfinite(gamma_reg))
        throw ValidationError("EmbeddingConfig: gamma_reg must be positive");
}

IncidenceMatrix::IncidenceMatrix(std::size_t nodes, const std::vector<Edge>& edges) : entries_(nodes, edges.size()) {
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const Edge& e = edges[l];
        if (e.source >= nodes || e.target >= nodes || e.source == e.target)
            throw ValidationError("IncidenceMatrix: invalid edge endpoints");
        entries_(e.source, l) = 1.0;
        entries_(e.target, l) = -1.0;
    }
}

Matrix LinkGraph::weight_matrix() const {
    Matrix w(edges.size(), edges.size());
    for (std::size_t l = 0; l < edges.size(); ++l) w(l, l) = edges[l].weight;
    return w;
}

SymMatrix LinkGraph::laplacian() const {
    const Matrix a = incidence().entries();
    return SymMatrix(a * weight_matrix() * a.transposed());
}

LinkGraph graph_com(const Layout& layout, std::size_t q, WeightNormalization norm) {
    check_pair(layout, q);
    return {2 * layout.pair_count(), {{tx_node(q), rx_node(q), edge_weight(layout, q, q, norm)}}};
}

LinkGraph graph_int(const Layout& layout, std::size_t q, WeightNormalization norm) {
    check_pair(layout, q);
    LinkGraph g{2 * layout.pair_count(), {}};
    for (std::size_t i = 0; i < layout.pair_count(); ++i)
        if (i != q) g.edges.push_back({tx_node(i), rx_node(q), edge_weight(layout, i, q, norm)});
    return g;
}

LinkGraph graph_nbr(const Layout& layout, std::size_t q, WeightNormalization norm) {
    check_pair(layout, q);
    LinkGraph g{2 * layout.pair_count(), {}};
    for (std::size_t i = 0; i < layout.pair_count(); ++i) {
        if (i == q) continue;
        g.edges.push_back({tx_node(i), rx_node(i), edge_weight(layout, i, i, norm)});
        g.edges.push_back({tx_node(q), rx_node(i), edge_weight(layout, q, i, norm)});
    }
    return g;
}

SymMatrix laplacian_com(const Layout& layout, std::size_t q, WeightNormalization norm) {
    return graph_com(layout, q, norm).laplacian();
}

SymMatrix laplacian_int(const Layout& layout, std::size_t q, WeightNormalization norm) {
    return graph_int(layout, q, norm).laplacian();
}

SymMatrix laplacian_nbr(const Layout& layout, std::size_t q, WeightNormalization norm) {
    return graph_nbr(layout, q, norm).laplacian();
}

std::vector<std::size_t> link_centric_order(const Layout& layout, std::size_t q) {
    check_pair(layout, q);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < layout.pair_count(); ++i)
        if (i != q) others.push_back(i);
    auto key = [&](std::size_t i) { return layout.link_distance(i, q) + layout.link_distance(q, i); };
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    others.insert(others.begin(), q);
    return others;
}

Layout relabel_pairs(const Layout& layout, const std::vector<std::size_t>& order) {
    if (order.size() != layout.pair_count()) throw ValidationError("relabel_pairs: order length does not match K");
    Layout out = layout;
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.tx[k] = layout.tx.at(order[k]);
        out.rx[k] = layout.rx.at(order[k]);
    }
    return out;
}

LinkEmbedding embed_link(const Layout& layout, std::size_t q, const EmbeddingConfig& cfg) {
    cfg.validate();
    check_pair(layout, q);
    const auto norm = cfg.weight_normalization;
    const bool centric = cfg.node_order == NodeOrder::link_centric;
    const Layout relabeled = centric ? relabel_pairs(layout, link_centric_order(layout, q)) : Layout{};
    const Layout& src = centric ? relabeled : layout;
    const std::size_t target = centric ? 0 : q;
    SpdMatrix s_com = shifted(laplacian_com(src, target, norm), cfg.gamma_reg);
    SpdMatrix s_int = shifted(laplacian_int(src, target, norm), cfg.gamma_reg);
    SpdMatrix s_nbr = shifted(laplacian_nbr(src, target, norm), cfg.gamma_reg);
    SpdMatrix s_dq(s_com.matrix() + s_int.matrix() + s_nbr.matrix());
    return {q, std::move(s_com), std::move(s_int), std::move(s_nbr), std::move(s_dq)};
}

std::vector<LinkEmbedding> embed_layout(const Layout& layout, const EmbeddingConfig& cfg) {
    std::vector<LinkEmbedding> out;
    out.reserve(layout.pair_count());
    for (std::size_t q = 0; q < layout.pair_count(); ++q) out.push_back(embed_link(layout, q, cfg));
    return out;
}

}  // namespace lemsched
