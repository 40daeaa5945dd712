pub mod audit;
pub mod check;
pub mod classify;
pub mod expand;
pub mod gamma;
pub mod gaps;
pub mod repro;
pub mod tile;
