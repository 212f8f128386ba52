pub mod bohr;
pub mod coloring;
pub mod error;
pub mod fourier;
pub mod graph;
pub mod grid;
pub mod output;
pub mod pipeline;
pub mod primes;
pub mod report;
pub mod schur;
pub mod search;

pub use coloring::{Color, Coloring, Domain};
pub use error::{Error, Result};
pub use fourier::{FourierTable, WeightVector};
pub use pipeline::{run, ColoringSource, Mode, RunConfig, RunReport};
pub use primes::{PrimeTable, WTrickParams};
pub use report::{LemmaReport, Regime, Relation};
pub use search::Witness;
