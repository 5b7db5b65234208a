//! Simulation of spin-mapped Majorana zero mode qubits: exact Pauli and
//! Majorana algebra, braid compilation to a CZ-native gate set, teleportation
//! between Kitaev chains with syndrome postselection, a Monte Carlo noise
//! model, and single-qubit tomography.

pub mod compiler;
pub mod config;
pub mod error;
pub mod kitaev;
pub mod logical;
pub mod majorana;
pub mod noise;
pub mod pauli;
pub mod report;
pub mod state;
pub mod teleport;
pub mod tomography;
pub mod verify;

pub use error::{Error, Result};
