//! Boolean circuits, a constant-folding builder and Yao garbling.

pub mod builder;
pub mod circuit;
pub mod yao;

pub use builder::{CircuitBuilder, Wire};
pub use circuit::{circuit_eval, BoolCircuit, Gate, GateShape, Topology};
pub use yao::{
    garble, gc_eval, gc_simulate, labels_for, GarbledCircuit, Label, DEFAULT_LABEL_BYTES,
    MAX_LABEL_BYTES, MIN_LABEL_BYTES,
};
