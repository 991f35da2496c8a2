//! Edge percolation on d-regular pseudo-random graphs.
//!
//! The crate builds host graphs ([`generators`]), estimates their second
//! eigenvalue and audits edge discrepancy ([`spectral`]), samples random
//! edge subsets ([`percolation`]), breaks samples into classified components
//! ([`census`]), evaluates the analytic predictions ([`theory`]) and runs
//! configured Monte Carlo experiments against them ([`harness`]).

pub mod census;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod percolation;
pub mod rng;
pub mod spectral;
pub mod theory;

pub use census::{census, ComponentCensus};
pub use generators::GeneratorSpec;
pub use graph::{build_graph, Graph, GraphError};
pub use percolation::{Model, PercolationSample};
pub use theory::TheoryProfile;
