//! Incremental circuit construction with constant folding.
//!
//! A [`Wire`] is either a known constant or a circuit wire. Operations on
//! constants fold away, so gating a network by a constant leaves no gates
//! behind. Constants are materialized as `CONST` gates only when they reach
//! an output.

use std::collections::HashMap;

use super::circuit::{BoolCircuit, Gate};
use crate::bits::BitVec;
use crate::error::{Error, Result};

/// A value during construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Wire {
    /// Known constant.
    Const(bool),
    /// Circuit wire id.
    Id(usize),
}

/// Builder for a [`BoolCircuit`].
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    n_inputs: usize,
    gates: Vec<Gate>,
    memo: HashMap<Gate, usize>,
}

impl CircuitBuilder {
    /// Builder with `n_inputs` input wires.
    pub fn new(n_inputs: usize) -> Self {
        Self {
            n_inputs,
            gates: Vec::new(),
            memo: HashMap::new(),
        }
    }

    /// Input width.
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// Input wire `i`.
    pub fn input(&self, i: usize) -> Wire {
        assert!(i < self.n_inputs, "input {i} out of range");
        Wire::Id(i)
    }

    /// All input wires.
    pub fn inputs(&self) -> Vec<Wire> {
        (0..self.n_inputs).map(Wire::Id).collect()
    }

    /// Gate count so far.
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    fn emit(&mut self, gate: Gate) -> Wire {
        if let Some(&id) = self.memo.get(&gate) {
            return Wire::Id(id);
        }
        let id = self.n_inputs + self.gates.len();
        self.gates.push(gate);
        self.memo.insert(gate, id);
        Wire::Id(id)
    }

    /// `a ∧ b`.
    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        match (a, b) {
            (Wire::Const(false), _) | (_, Wire::Const(false)) => Wire::Const(false),
            (Wire::Const(true), x) | (x, Wire::Const(true)) => x,
            (Wire::Id(x), Wire::Id(y)) if x == y => a,
            (Wire::Id(x), Wire::Id(y)) => self.emit(Gate::And(x.min(y), x.max(y))),
        }
    }

    /// `a ⊕ b`.
    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        match (a, b) {
            (Wire::Const(u), Wire::Const(v)) => Wire::Const(u ^ v),
            (Wire::Const(false), x) | (x, Wire::Const(false)) => x,
            (Wire::Const(true), x) | (x, Wire::Const(true)) => self.not(x),
            (Wire::Id(x), Wire::Id(y)) if x == y => Wire::Const(false),
            (Wire::Id(x), Wire::Id(y)) => self.emit(Gate::Xor(x.min(y), x.max(y))),
        }
    }

    /// `¬a`.
    pub fn not(&mut self, a: Wire) -> Wire {
        match a {
            Wire::Const(v) => Wire::Const(!v),
            Wire::Id(x) => match self.gates.get(x.wrapping_sub(self.n_inputs)) {
                Some(&Gate::Not(inner)) if x >= self.n_inputs => Wire::Id(inner),
                _ => self.emit(Gate::Not(x)),
            },
        }
    }

    /// `a ∨ b`.
    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        let (na, nb) = (self.not(a), self.not(b));
        let both = self.and(na, nb);
        self.not(both)
    }

    /// `sel ? b : a`.
    pub fn mux(&mut self, sel: Wire, a: Wire, b: Wire) -> Wire {
        let d = self.xor(a, b);
        let t = self.and(sel, d);
        self.xor(a, t)
    }

    /// Componentwise [`Self::mux`].
    pub fn mux_bits(&mut self, sel: Wire, a: &[Wire], b: &[Wire]) -> Vec<Wire> {
        assert_eq!(a.len(), b.len(), "mux operands differ in width");
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.mux(sel, x, y))
            .collect()
    }

    /// Componentwise XOR.
    pub fn xor_bits(&mut self, a: &[Wire], b: &[Wire]) -> Vec<Wire> {
        assert_eq!(a.len(), b.len(), "xor operands differ in width");
        a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect()
    }

    /// Componentwise AND with a single wire.
    pub fn and_all(&mut self, gate: Wire, a: &[Wire]) -> Vec<Wire> {
        a.iter().map(|&x| self.and(gate, x)).collect()
    }

    /// Conjunction of all wires (true on the empty list).
    pub fn and_many(&mut self, ws: &[Wire]) -> Wire {
        match ws.len() {
            0 => Wire::Const(true),
            1 => ws[0],
            n => {
                let (l, r) = ws.split_at(n / 2);
                let (l, r) = (self.and_many(l), self.and_many(r));
                self.and(l, r)
            }
        }
    }

    /// Constant wires for `value`.
    pub fn constant(&self, value: &BitVec) -> Vec<Wire> {
        value.iter().map(Wire::Const).collect()
    }

    /// `a == value` for a constant bit string.
    pub fn eq_const(&mut self, a: &[Wire], value: &BitVec) -> Wire {
        assert_eq!(a.len(), value.len(), "comparator width mismatch");
        let lits: Vec<Wire> = a
            .iter()
            .zip(value.iter())
            .map(|(&w, v)| if v { w } else { self.not(w) })
            .collect();
        self.and_many(&lits)
    }

    /// `a == b`.
    pub fn eq(&mut self, a: &[Wire], b: &[Wire]) -> Wire {
        let d = self.xor_bits(a, b);
        let lits: Vec<Wire> = d.into_iter().map(|w| self.not(w)).collect();
        self.and_many(&lits)
    }

    /// Unsigned `a < b`, both least-significant bit first.
    pub fn lt(&mut self, a: &[Wire], b: &[Wire]) -> Wire {
        assert_eq!(a.len(), b.len(), "comparator width mismatch");
        let mut less = Wire::Const(false);
        for (&x, &y) in a.iter().zip(b) {
            let nx = self.not(x);
            let here = self.and(nx, y);
            let same = self.xor(x, y);
            let same = self.not(same);
            let keep = self.and(same, less);
            less = self.or(here, keep);
        }
        less
    }

    /// `table[index]` for an index given least-significant bit first; out-of-range entries read as zero.
    pub fn select_bits(&mut self, index: &[Wire], table: &[BitVec]) -> Vec<Wire> {
        let width = table.first().map_or(0, BitVec::len);
        assert!(
            table.iter().all(|t| t.len() == width),
            "table rows differ in width"
        );
        let mut level: Vec<Vec<Wire>> = (0..1usize << index.len())
            .map(|i| {
                table
                    .get(i)
                    .map_or_else(|| vec![Wire::Const(false); width], |t| self.constant(t))
            })
            .collect();
        for &bit in index {
            level = level
                .chunks(2)
                .map(|pair| self.mux_bits(bit, &pair[0], &pair[1]))
                .collect();
        }
        level.pop().unwrap_or_default()
    }

    /// Finishes the circuit with the given outputs, materializing constant outputs.
    pub fn finish(mut self, outputs: &[Wire]) -> Result<BoolCircuit> {
        let mut ids = Vec::with_capacity(outputs.len());
        for &o in outputs {
            ids.push(match o {
                Wire::Id(i) => i,
                Wire::Const(v) => match self.emit(Gate::Const(v)) {
                    Wire::Id(i) => i,
                    Wire::Const(_) => {
                        return Err(Error::Circuit("constant materialization failed".into()))
                    }
                },
            });
        }
        BoolCircuit::new(self.n_inputs, self.gates, ids)
    }
}
