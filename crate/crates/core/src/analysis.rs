//! Analytic and empirical degree distributions, and curve similarity.

mod degree;
mod similarity;

pub use degree::{
    ba_degree_pdf, empirical_distribution, hybrid_average_degree, hybrid_degree_pdf, total_variation, ws_degree_pmf,
    Binning, DegreeHistogram, LogBin, RewireRate, TailFit, DEFAULT_BINS_PER_DECADE,
};
pub use similarity::{rank_by_similarity, similarity, similarity_report, Curve, SimilarityReport};
