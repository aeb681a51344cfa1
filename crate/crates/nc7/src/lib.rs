//! Modular-form computations for the index-7 noncongruence subgroups of the
//! modular group: group arithmetic and membership, exact hauptmodul
//! q-expansions, unbounded-denominator certificates, and Eisenstein-series
//! Fourier coefficients via Dirichlet-type summation.

pub mod eisenstein;
pub mod exactfield;
pub mod permgroup;
pub mod hauptmodul;
pub mod qseries;
