"""
Attributed k-nearest-neighbour graph construction.
"""
from graph.attributed import (
    AttributedGraph, cosine_similarity, similarity_matrix, knn_neighbors,
    rank_neighbors, edge_weights, build_graph, read_edges_csv,
)

__all__ = [
    'AttributedGraph', 'cosine_similarity', 'similarity_matrix', 'knn_neighbors',
    'rank_neighbors', 'edge_weights', 'build_graph', 'read_edges_csv',
]
