//! Exact computation of bounding chains and open Gromov–Witten superpotentials for
//! A∞ algebras given by q-operator structure constants over finite cochain models.

pub mod bounding;
pub mod cochain;
pub mod linalg;
pub mod novikov;
pub mod qops;
pub mod rational;
pub mod setting;
pub mod superpotential;

pub type Q = num_rational::BigRational;
