//! Heat kernels of discretized generators and numerical checks of their
//! regularity: metric graphs, the Sierpiński gasket, a damped wave block
//! system and non-autonomous form families.

pub mod cli;
pub mod damped_wave;
pub mod error;
pub mod fractal_ops;
pub mod graph_ops;
pub mod kernel;
pub mod linalg;
pub mod nonauto;
pub mod operator;
pub mod regcheck;
pub mod space;

pub use error::{Error, Result};
