//! Free particle on the noncommutative plane `[x, y] = i theta`: coherent
//! state path integral, Voros star calculus on Gaussian symbols, and
//! independent numerical oracles.

pub mod cli;
pub mod error;
pub mod fock;
pub mod hilbert;
pub mod oracles;
pub mod propagator;
pub mod star;

pub use error::{Error, Result};
pub use fock::{FockSpace, FockVector, PhysicalParams};
pub use hilbert::{FockOperator, MomentumPoint, PlanePoint};
pub use propagator::{closed_form_kernel, sliced_kernel, GaussianSlice, KernelParams, SliceSchedule};
pub use star::{star, GaussianSymbol, Slot};
