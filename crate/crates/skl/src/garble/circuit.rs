//! Boolean circuits over {AND, XOR, NOT, CONST}, plaintext evaluation and the text format.
//!
//! Wires `0..n_inputs` are inputs; gate `g` drives wire `n_inputs + g`. Gates
//! are topologically ordered: every operand names an earlier wire.
//!
//! Text format:
//!
//! ```text
//! inputs 3 outputs 4
//! 3 XOR 0 1
//! 4 XOR 3 2
//! ```
//!
//! and a constant gate is written `id CONST 0` or `id CONST 1`.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::error::{ensure_len, Error, Result};

/// A gate and its operand wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Conjunction.
    And(usize, usize),
    /// Exclusive or.
    Xor(usize, usize),
    /// Negation.
    Not(usize),
    /// Constant output.
    Const(bool),
}

impl Gate {
    /// Operand wires.
    pub fn operands(&self) -> Vec<usize> {
        match *self {
            Gate::And(a, b) | Gate::Xor(a, b) => vec![a, b],
            Gate::Not(a) => vec![a],
            Gate::Const(_) => vec![],
        }
    }

    /// The gate with its constant value erased.
    pub fn shape(&self) -> GateShape {
        match *self {
            Gate::And(a, b) => GateShape::And(a, b),
            Gate::Xor(a, b) => GateShape::Xor(a, b),
            Gate::Not(a) => GateShape::Not(a),
            Gate::Const(_) => GateShape::Const,
        }
    }
}

/// A gate without constant values: the public shape used by simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateShape {
    /// Conjunction.
    And(usize, usize),
    /// Exclusive or.
    Xor(usize, usize),
    /// Negation.
    Not(usize),
    /// Constant of unspecified value.
    Const,
}

/// Wiring of a circuit with constants erased.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Topology {
    /// Number of input wires.
    pub n_inputs: usize,
    /// Gate shapes in order.
    pub gates: Vec<GateShape>,
    /// Output wire ids.
    pub outputs: Vec<usize>,
}

impl Topology {
    /// Total wire count.
    pub fn wire_count(&self) -> usize {
        self.n_inputs + self.gates.len()
    }
}

/// A validated boolean circuit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolCircuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl BoolCircuit {
    /// Validates wiring: operands and outputs must reference earlier wires.
    pub fn new(n_inputs: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        for (g, gate) in gates.iter().enumerate() {
            let id = n_inputs + g;
            if let Some(&bad) = gate.operands().iter().find(|&&w| w >= id) {
                return Err(Error::Circuit(format!(
                    "gate {id} reads wire {bad}, which is not earlier"
                )));
            }
        }
        let wires = n_inputs + gates.len();
        if let Some(&bad) = outputs.iter().find(|&&w| w >= wires) {
            return Err(Error::Circuit(format!("output wire {bad} does not exist")));
        }
        Ok(Self {
            n_inputs,
            gates,
            outputs,
        })
    }

    /// Input width.
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// Gates in order.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Output wire ids.
    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Total wire count.
    pub fn wire_count(&self) -> usize {
        self.n_inputs + self.gates.len()
    }

    /// The constant-free wiring.
    pub fn topology(&self) -> Topology {
        Topology {
            n_inputs: self.n_inputs,
            gates: self.gates.iter().map(Gate::shape).collect(),
            outputs: self.outputs.clone(),
        }
    }
}

/// Plaintext evaluation.
pub fn circuit_eval(c: &BoolCircuit, x: &BitVec) -> Result<BitVec> {
    ensure_len(c.n_inputs, x.len())?;
    let mut wires = x.to_bools();
    wires.reserve(c.gates.len());
    for gate in &c.gates {
        let v = match *gate {
            Gate::And(a, b) => wires[a] & wires[b],
            Gate::Xor(a, b) => wires[a] ^ wires[b],
            Gate::Not(a) => !wires[a],
            Gate::Const(v) => v,
        };
        wires.push(v);
    }
    Ok(BitVec::from_bools(
        &c.outputs.iter().map(|&o| wires[o]).collect::<Vec<_>>(),
    ))
}

impl fmt::Display for BoolCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let outs: Vec<String> = self.outputs.iter().map(usize::to_string).collect();
        writeln!(f, "inputs {} outputs {}", self.n_inputs, outs.join(","))?;
        for (g, gate) in self.gates.iter().enumerate() {
            let id = self.n_inputs + g;
            match *gate {
                Gate::And(a, b) => writeln!(f, "{id} AND {a} {b}")?,
                Gate::Xor(a, b) => writeln!(f, "{id} XOR {a} {b}")?,
                Gate::Not(a) => writeln!(f, "{id} NOT {a}")?,
                Gate::Const(v) => writeln!(f, "{id} CONST {}", u8::from(v))?,
            }
        }
        Ok(())
    }
}

fn parse_usize(tok: Option<&str>, what: &str, line: usize) -> Result<usize> {
    tok.ok_or_else(|| Error::Circuit(format!("line {line}: missing {what}")))?
        .parse()
        .map_err(|_| Error::Circuit(format!("line {line}: bad {what}")))
}

impl FromStr for BoolCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::Circuit("empty circuit text".into()))?;
        let mut toks = header.split_whitespace();
        if toks.next() != Some("inputs") {
            return Err(Error::Circuit(format!(
                "line {ln}: expected `inputs N outputs ...`"
            )));
        }
        let n_inputs = parse_usize(toks.next(), "input count", ln)?;
        if toks.next() != Some("outputs") {
            return Err(Error::Circuit(format!("line {ln}: expected `outputs`")));
        }
        let outputs = match toks.next() {
            None => Vec::new(),
            Some(list) => list
                .split(',')
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Circuit(format!("line {ln}: bad output id {t:?}")))
                })
                .collect::<Result<Vec<usize>>>()?,
        };
        if toks.next().is_some() {
            return Err(Error::Circuit(format!(
                "line {ln}: trailing tokens in header"
            )));
        }
        let mut gates = Vec::new();
        for (ln, line) in lines {
            let mut toks = line.split_whitespace();
            let id = parse_usize(toks.next(), "gate id", ln)?;
            if id != n_inputs + gates.len() {
                return Err(Error::Circuit(format!(
                    "line {ln}: gate id {id} out of sequence"
                )));
            }
            let op = toks
                .next()
                .ok_or_else(|| Error::Circuit(format!("line {ln}: missing op")))?;
            let gate = match op {
                "AND" => Gate::And(
                    parse_usize(toks.next(), "operand", ln)?,
                    parse_usize(toks.next(), "operand", ln)?,
                ),
                "XOR" => Gate::Xor(
                    parse_usize(toks.next(), "operand", ln)?,
                    parse_usize(toks.next(), "operand", ln)?,
                ),
                "NOT" => Gate::Not(parse_usize(toks.next(), "operand", ln)?),
                "CONST" => match toks.next() {
                    Some("0") => Gate::Const(false),
                    Some("1") => Gate::Const(true),
                    _ => return Err(Error::Circuit(format!("line {ln}: CONST takes 0 or 1"))),
                },
                other => return Err(Error::Circuit(format!("line {ln}: unknown op {other:?}"))),
            };
            if toks.next().is_some() {
                return Err(Error::Circuit(format!("line {ln}: trailing tokens")));
            }
            gates.push(gate);
        }
        BoolCircuit::new(n_inputs, gates, outputs)
    }
}
