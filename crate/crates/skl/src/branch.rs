//! Exact simulation of lessee states with at most two computational-basis branches.
//!
//! A [`BranchState`] is `Σ_b α_b |r_b⟩` where each `r_b` is a tuple of named
//! registers and the amplitudes are nonnegative reals. Every state produced
//! by the honest protocols has this shape: a claw superposition, extended by
//! classical functions of the branch contents.

use rand::Rng;

use crate::bits::{coset_sample, BitVec};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// Maximum number of branches a state may hold.
pub const MAX_BRANCHES: usize = 2;

const NORM_TOLERANCE: f64 = 1e-9;

/// Named registers of one branch, in insertion order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Registers {
    regs: Vec<(String, BitVec)>,
}

impl Registers {
    /// Registers from `(name, value)` pairs; names must be distinct.
    pub fn new(regs: Vec<(String, BitVec)>) -> Result<Self> {
        for (i, (name, _)) in regs.iter().enumerate() {
            if regs[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidState(format!(
                    "register {name:?} appears twice"
                )));
            }
        }
        Ok(Self { regs })
    }

    /// A single register.
    pub fn single(name: &str, value: BitVec) -> Self {
        Self {
            regs: vec![(name.to_string(), value)],
        }
    }

    /// Value of register `name`.
    pub fn get(&self, name: &str) -> Option<&BitVec> {
        self.regs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Value of register `name`, or an error naming it.
    pub fn require(&self, name: &str) -> Result<&BitVec> {
        self.get(name)
            .ok_or_else(|| Error::InvalidState(format!("no register {name:?}")))
    }

    /// Register names in order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.regs.iter().map(|(n, _)| n.as_str())
    }

    /// `(name, value)` pairs in order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &BitVec)> {
        self.regs.iter().map(|(n, v)| (n.as_str(), v))
    }

    /// Number of registers.
    pub fn len(&self) -> usize {
        self.regs.len()
    }

    /// True when there are no registers.
    pub fn is_empty(&self) -> bool {
        self.regs.is_empty()
    }

    /// All registers concatenated in order.
    pub fn concat(&self) -> BitVec {
        BitVec::concat_all(self.regs.iter().map(|(_, v)| v))
    }

    fn layout(&self) -> Vec<(&str, usize)> {
        self.regs
            .iter()
            .map(|(n, v)| (n.as_str(), v.len()))
            .collect()
    }

    fn with(&self, name: &str, value: BitVec) -> Self {
        let mut regs = self.regs.clone();
        regs.push((name.to_string(), value));
        Self { regs }
    }

    fn without(&self, name: &str) -> Self {
        Self {
            regs: self
                .regs
                .iter()
                .filter(|(n, _)| n != name)
                .cloned()
                .collect(),
        }
    }
}

/// One weighted branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Nonnegative amplitude.
    pub amplitude: f64,
    /// Register contents.
    pub registers: Registers,
}

/// A normalized superposition of at most [`MAX_BRANCHES`] distinct basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchState {
    branches: Vec<Branch>,
}

impl BranchState {
    /// Validates and normalizes a list of `(amplitude, registers)` pairs.
    ///
    /// Zero-amplitude branches are kept when at least one amplitude is positive.
    pub fn make_state(branches: Vec<(f64, Registers)>) -> Result<Self> {
        if branches.is_empty() || branches.len() > MAX_BRANCHES {
            return Err(Error::InvalidState(format!(
                "{} branches; between 1 and {MAX_BRANCHES} are allowed",
                branches.len()
            )));
        }
        if branches.iter().any(|(a, _)| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidState(
                "amplitudes must be finite and nonnegative".into(),
            ));
        }
        let layout = branches[0].1.layout();
        for (_, regs) in &branches[1..] {
            if regs.layout() != layout {
                return Err(Error::InvalidState(
                    "branches disagree on register names or lengths".into(),
                ));
            }
        }
        if branches.len() == 2 && branches[0].1 == branches[1].1 {
            return Err(Error::InvalidState("duplicate branch contents".into()));
        }
        let norm = branches.iter().map(|(a, _)| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero norm".into()));
        }
        Ok(Self {
            branches: branches
                .into_iter()
                .map(|(a, registers)| Branch {
                    amplitude: a / norm,
                    registers,
                })
                .collect(),
        })
    }

    /// A one-branch classical state.
    pub fn classical(registers: Registers) -> Self {
        Self {
            branches: vec![Branch {
                amplitude: 1.0,
                registers,
            }],
        }
    }

    /// The branches.
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Number of branches.
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Amplitudes in branch order.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.amplitude).collect()
    }

    /// `Σ α²`.
    pub fn norm_sq(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.amplitude * b.amplitude)
            .sum()
    }

    /// Register names (shared by every branch).
    pub fn register_names(&self) -> Vec<String> {
        self.branches[0]
            .registers
            .names()
            .map(str::to_string)
            .collect()
    }

    /// Appends `out_name = f(registers)` in every branch.
    pub fn apply_map<F>(&self, out_name: &str, mut f: F) -> Result<Self>
    where
        F: FnMut(&Registers) -> Result<BitVec>,
    {
        if self.branches[0].registers.get(out_name).is_some() {
            return Err(Error::InvalidState(format!(
                "register {out_name:?} already present"
            )));
        }
        let mut out = Vec::with_capacity(self.branches.len());
        for (i, b) in self.branches.iter().enumerate() {
            let value = f(&b.registers)
                .map_err(|e| Error::InvalidState(format!("map undefined on branch {i}: {e}")))?;
            out.push(Branch {
                amplitude: b.amplitude,
                registers: b.registers.with(out_name, value),
            });
        }
        if out.len() == 2 && out[0].registers.layout() != out[1].registers.layout() {
            return Err(Error::InvalidState(format!(
                "map produced different lengths for {out_name:?}"
            )));
        }
        Ok(Self { branches: out })
    }

    /// Removes register `name` after checking it equals `f(other registers)` in every branch.
    pub fn uncompute<F>(&self, name: &str, mut f: F) -> Result<Self>
    where
        F: FnMut(&Registers) -> Result<BitVec>,
    {
        let mut out = Vec::with_capacity(self.branches.len());
        for (i, b) in self.branches.iter().enumerate() {
            let held = b.registers.require(name)?;
            let rest = b.registers.without(name);
            let expect = f(&rest)
                .map_err(|e| Error::InvalidState(format!("map undefined on branch {i}: {e}")))?;
            if &expect != held {
                return Err(Error::InvalidState(format!(
                    "register {name:?} is not uncomputable on branch {i}"
                )));
            }
            out.push(Branch {
                amplitude: b.amplitude,
                registers: rest,
            });
        }
        if out.len() == 2 && out[0].registers == out[1].registers {
            return Err(Error::InvalidState(format!(
                "removing {name:?} would merge the branches"
            )));
        }
        Ok(Self { branches: out })
    }

    /// Measures register `name` in the computational basis.
    pub fn measure_register<R: Rng + ?Sized>(
        &self,
        name: &str,
        rng: &mut R,
    ) -> Result<(BitVec, Self)> {
        let values: Vec<&BitVec> = self
            .branches
            .iter()
            .map(|b| b.registers.require(name))
            .collect::<Result<_>>()?;
        if values.len() == 1 || values[0] == values[1] {
            return Ok((values[0].clone(), self.clone()));
        }
        let p0 = self.branches[0].amplitude.powi(2) / self.norm_sq();
        let pick = usize::from(rng.gen::<f64>() >= p0);
        Ok((values[pick].clone(), self.collapse_to(pick)))
    }

    /// Measures every register in the Hadamard basis, returning the outcome over the concatenated registers.
    ///
    /// For branches `u`, `v` with amplitudes `(q₀, q₁)` the outcome lies in the coset
    /// `⟨w, u⊕v⟩ = 0` with probability `(q₀+q₁)²/2` and is uniform within its coset.
    pub fn measure_hadamard_all<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let u = self.branches[0].registers.concat();
        if self.branches.len() == 1 {
            return BitVec::random(u.len(), rng);
        }
        let v = self.branches[1].registers.concat();
        let delta = u.xor(&v).expect("equal layouts");
        let (q0, q1) = (self.branches[0].amplitude, self.branches[1].amplitude);
        let p_even = (q0 + q1).powi(2) / (2.0 * (q0 * q0 + q1 * q1));
        let theta = rng.gen::<f64>() >= p_even;
        coset_sample(&delta, theta, rng).expect("distinct branches give a nonzero direction")
    }

    /// The state projected onto branch `index`.
    pub fn collapse_to(&self, index: usize) -> Self {
        Self {
            branches: vec![Branch {
                amplitude: 1.0,
                registers: self.branches[index].registers.clone(),
            }],
        }
    }

    /// Same registers with new amplitudes, renormalized; a branch with zero weight is dropped.
    pub fn reweight(&self, amplitudes: &[f64]) -> Result<Self> {
        if amplitudes.len() != self.branches.len() {
            return Err(Error::LengthMismatch {
                expected: self.branches.len(),
                got: amplitudes.len(),
            });
        }
        let kept: Vec<(f64, Registers)> = self
            .branches
            .iter()
            .zip(amplitudes)
            .filter(|(_, &a)| a > 0.0)
            .map(|(b, &a)| (a, b.registers.clone()))
            .collect();
        Self::make_state(kept)
    }

    /// Serializes the branches: count, then per branch the amplitude and the named registers.
    pub fn encode(&self, w: &mut Writer) {
        w.u8(self.branches.len() as u8);
        for b in &self.branches {
            w.f64(b.amplitude);
            w.len(b.registers.len());
            for (name, value) in b.registers.iter() {
                w.str(name);
                w.bits(value);
            }
        }
    }

    /// Inverse of [`Self::encode`]; amplitudes are restored bit for bit.
    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let count = r.u8()? as usize;
        if count == 0 || count > MAX_BRANCHES {
            return Err(Error::Decode(format!("{count} branches")));
        }
        let mut pairs = Vec::with_capacity(count);
        for _ in 0..count {
            let amplitude = r.f64()?;
            let regs = (0..r.len(5)?)
                .map(|_| Ok((r.str()?, r.bits()?)))
                .collect::<Result<Vec<_>>>()?;
            pairs.push((amplitude, Registers::new(regs)?));
        }
        let exact: Vec<f64> = pairs.iter().map(|(a, _)| *a).collect();
        if (exact.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Decode("amplitudes are not normalized".into()));
        }
        let mut state = Self::make_state(pairs).map_err(|e| Error::Decode(e.to_string()))?;
        for (b, a) in state.branches.iter_mut().zip(exact) {
            b.amplitude = a;
        }
        Ok(state)
    }

    /// Checks the normalization invariant.
    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORM_TOLERANCE
    }
}
