//! Exact simulation, canonical forms, CNOT-distance classification and
//! minimal-CNOT state preparation for two- and three-qubit pure states.

pub mod canonical;
pub mod classifier;
pub mod error;
pub mod gate;
pub mod interchange;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod state;
pub mod synth;

pub use error::{Error, Result};
pub use gate::{Circuit, Gate};
pub use state::{fidelity, haar_sample, PureState};
