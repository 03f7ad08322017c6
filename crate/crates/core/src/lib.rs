pub mod curve;
pub mod engine;
pub mod error;
pub mod forms;
pub mod frobenius;
pub mod ntt;
pub mod padic;
pub mod par;
pub mod qseries;

pub use error::{Error, Result};
pub use padic::{unit_root, val_p, PadicContext, PadicInt};
pub use par::Exec;
pub use qseries::{CoeffRing, Integers, RingDescriptor, Series};
