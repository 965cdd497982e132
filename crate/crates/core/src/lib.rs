pub mod cm;
pub mod error;
pub mod gaussian_ops;
pub mod linalg;
pub mod measures;
pub mod rng;
pub mod symplectic;
pub mod verify;

pub use cm::{CovarianceMatrix, ModePartition, Party, PartySelector};
pub use error::{CmError, Result};
pub use gaussian_ops::GaussianMapSpec;
pub use linalg::{DenseMatrix, IndexSet};
pub use measures::{MeasureKind, MeasureValue};
pub use rng::SeededRng;
pub use symplectic::WilliamsonResult;
pub use verify::{CheckConfig, CheckId, PropertyReport};
