pub mod asymptotics;
pub mod cli;
pub mod combinatorics;
pub mod context;
pub mod error;
pub mod jet;
pub mod polylog;
pub mod quad;
pub mod series;
pub mod special;
pub mod suite;

pub use context::{PrecisionContext, Real};
pub use error::{Error, Result};
pub use jet::Jet;
