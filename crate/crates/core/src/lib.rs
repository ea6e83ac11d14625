//! Quantum battery built from an open XY–Γ(γ) spin chain.
//!
//! The crate covers the battery Hamiltonians, thermal initial states, closed
//! (unitary) charging of a single momentum-mode pair, open (Lindblad)
//! charging of the full chain, and power-law fits of peak ergotropy against
//! chain length.

pub mod closed;
pub mod error;
pub mod linalg;
pub mod open;
pub mod scaling;
pub mod spin;
pub mod thermal;

pub use closed::{ChargeProtocol, ErgotropyTrace, SweepParam, SweepResult, Transition};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianEig};
pub use open::{IntegratorConfig, LindbladSpec, SteadyStop, Trajectory};
pub use scaling::{PeakSeries, PowerLawFit, ScalingClass};
pub use spin::{Axis, ChainSpec, ChargeAxis, ModeCoefficients, ModeSpec};
pub use thermal::{DensityMatrix, Temperature};
