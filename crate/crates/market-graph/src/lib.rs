//! Market graph identification in sign-similarity and Pearson correlation
//! networks.
//!
//! A market graph connects two instruments when their pairwise similarity
//! exceeds a threshold. This crate identifies that graph from multivariate
//! observations with two optimal multiple-decision procedures:
//!
//! * the **sign procedure**: per-edge exact binomial tests on
//!   sign-coincidence counts, optimal under additive loss for any
//!   sign-symmetric (elliptical) distribution;
//! * the **Pearson procedure**: per-edge Fisher z tests on sample
//!   correlations, the classical reference, optimal for Gaussian data.
//!
//! The [`risk`] module estimates and compares their risk functions by Monte
//! Carlo over a threshold grid, which is how the two procedures' very
//! different behavior under heavy-tailed (Student) data shows up. The
//! [`sampling`] module provides the reproducible Gaussian/Student generators
//! those experiments need, [`ingest`] loads real return tables, and [`plot`]
//! renders the curves as SVG.
//!
//! The `guide` module mirrors the chapters of the book in `book/`; its code
//! blocks run as doctests so the narrative stays in sync with the API.

pub mod error;
pub mod graph;
pub mod ingest;
pub mod matrix;
mod normal;
pub mod pearson;
pub mod plot;
pub mod risk;
pub mod sampling;
pub mod sign;

pub use error::{Error, Result};
pub use graph::{
    correlation_from_sign_prob, reference_graph, sign_prob_from_correlation, AdjacencyMatrix,
    CenteringMode, CorrelationMatrix, SampleMatrix, SignProbabilityMatrix,
};
pub use matrix::SquareMatrix;

/// The book from `book/`, compiled chapter by chapter so every code block
/// in the guide runs as a doctest.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/networks.md")]
    pub mod networks {}
    #[doc = include_str!("../../../book/src/sign-procedure.md")]
    pub mod sign_procedure {}
    #[doc = include_str!("../../../book/src/pearson-procedure.md")]
    pub mod pearson_procedure {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    pub mod sampling {}
    #[doc = include_str!("../../../book/src/loss-and-risk.md")]
    pub mod loss_and_risk {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}

/// Per-edge significance levels: one level broadcast to every edge, or a
/// full symmetric matrix (the form loss-derived levels naturally take).
#[derive(Debug, Clone)]
pub enum AlphaSpec {
    Scalar(f64),
    PerEdge(SquareMatrix),
}

impl AlphaSpec {
    /// Level for edge `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            AlphaSpec::Scalar(a) => *a,
            AlphaSpec::PerEdge(m) => m.get(i, j),
        }
    }

    pub(crate) fn check(&self, dim: usize) -> Result<()> {
        match self {
            AlphaSpec::Scalar(a) => {
                if !(*a > 0.0 && *a < 1.0) {
                    return Err(Error::OutOfDomain {
                        what: "alpha",
                        value: *a,
                        domain: "(0, 1)",
                    });
                }
            }
            AlphaSpec::PerEdge(m) => {
                if m.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        left: m.dim(),
                        right: dim,
                    });
                }
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        let a = m.get(i, j);
                        if !(a > 0.0 && a < 1.0) {
                            return Err(Error::OutOfDomain {
                                what: "alpha",
                                value: a,
                                domain: "(0, 1)",
                            });
                        }
                        if a != m.get(j, i) {
                            return Err(Error::Asymmetric {
                                i,
                                j,
                                a,
                                b: m.get(j, i),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
