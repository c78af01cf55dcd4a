pub mod cli;
pub mod error;
pub mod measures;
pub mod oracle;
pub mod painleve;
pub mod params;
pub mod precision;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use precision::{PrecisionContext, Real};
