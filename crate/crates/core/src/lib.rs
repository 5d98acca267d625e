pub mod error;
pub mod estimators;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod process;
pub mod rng;
pub mod sampler;
pub mod specfun;
