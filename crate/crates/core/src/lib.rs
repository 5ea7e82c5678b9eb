//! Descent and cyclic-descent statistics of permutations under the
//! k-parameter riffle-shuffle measures R_{k,n} and C_{k,n}.

pub mod cli;
pub mod error;
pub mod exact;
pub mod hp;
pub mod measures;
pub mod moments;
pub mod oracle;
pub mod pair;
pub mod permcore;
pub mod pmf;
pub mod report;
pub mod sampler;
pub mod stein;
pub mod verify;

pub use error::{Error, Result};
pub use exact::Rational;
pub use measures::{Family, Flavor, MeasureSpec};
pub use permcore::{EulerianTable, Permutation};
pub use pmf::ExactPmf;
