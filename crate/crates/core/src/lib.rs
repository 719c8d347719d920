//! Fourier-series analysis, construction and training of data re-uploading
//! quantum models.

pub mod cli;
pub mod document;
pub mod fourier;
pub mod linalg;
pub mod output;
pub mod random;
pub mod sampling;
pub mod simulator;
pub mod spectra;
pub mod training;
pub mod universal;
