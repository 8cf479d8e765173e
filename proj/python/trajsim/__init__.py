"""Trajectory similarity measures, parallel evaluation, embeddings and vector search."""

from ._core import (
    BatchError,
    Clustering,
    Dataset,
    Embedding,
    EmbeddingStore,
    Error,
    FfnWeights,
    FlatIndex,
    IvfIndex,
    MeasureSpec,
    ParameterError,
    ParseError,
    Trajectory,
    ValidationError,
    distance_matrix,
    encode_dataset,
    evaluate,
    ffn_encode,
    generate_synthetic,
    hit_ratio,
    kmedoids,
    knn_exact,
    load_csv,
    load_index,
    measure_names,
    pair_recall,
    par_evaluate,
    parse_csv,
    rand_index,
    run_batch,
    similarity,
    validate_report,
    write_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
