//! Yao garbling with point-and-permute.
//!
//! Every wire carries two labels whose select bits (least significant bit of
//! byte 0) differ. A binary gate stores four rows indexed by the operands'
//! select bits; row `(a, b)` is `H(gid ‖ L_a ‖ L_b) ⊕ (L_out ‖ 0³²)` truncated to
//! the label length plus a 32-bit zero tag, so a label that does not belong
//! to the wire is rejected instead of silently decoding. NOT gates store two
//! rows; CONST gates publish their single label. Output wires publish an
//! 8-byte digest of each label.

use rand::{Rng, RngCore};
use sha2::{Digest, Sha256};

use super::circuit::{BoolCircuit, Gate, GateShape, Topology};
use crate::bits::BitVec;
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};

/// Default label length in bytes.
pub const DEFAULT_LABEL_BYTES: usize = 16;
/// Smallest accepted label length.
pub const MIN_LABEL_BYTES: usize = 8;
/// Largest accepted label length (a row must fit one SHA-256 block).
pub const MAX_LABEL_BYTES: usize = 28;

const TAG_BYTES: usize = 4;
const DIGEST_BYTES: usize = 8;
const ROW_DOMAIN: &[u8] = b"skl.gc.row";
const OUT_DOMAIN: &[u8] = b"skl.gc.out";

/// A wire label.
pub type Label = Vec<u8>;

fn select(label: &[u8]) -> usize {
    usize::from(label[0] & 1)
}

fn row_pad(gid: usize, keys: &[&[u8]], len: usize) -> Vec<u8> {
    let mut h = Sha256::new();
    h.update(ROW_DOMAIN);
    h.update((gid as u64).to_le_bytes());
    for k in keys {
        h.update(k);
    }
    h.finalize()[..len + TAG_BYTES].to_vec()
}

fn out_digest(wire: usize, label: &[u8]) -> [u8; DIGEST_BYTES] {
    let mut h = Sha256::new();
    h.update(OUT_DOMAIN);
    h.update((wire as u64).to_le_bytes());
    h.update(label);
    h.finalize()[..DIGEST_BYTES]
        .try_into()
        .expect("digest prefix")
}

fn seal(pad: Vec<u8>, out: &[u8]) -> Vec<u8> {
    pad.iter()
        .zip(out.iter().chain(std::iter::repeat(&0u8)))
        .map(|(p, o)| p ^ o)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Table {
    Rows(Vec<Vec<u8>>),
    Clear(Label),
}

/// A garbled circuit: wiring, encrypted tables and the output decoding map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GarbledCircuit {
    label_bytes: usize,
    topology: Topology,
    tables: Vec<Table>,
    decode: Vec<[[u8; DIGEST_BYTES]; 2]>,
}

impl GarbledCircuit {
    /// Label length in bytes.
    pub fn label_bytes(&self) -> usize {
        self.label_bytes
    }

    /// The public wiring.
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Output decoding digests, `[digest(L⁰), digest(L¹)]` per output wire.
    pub fn decode_map(&self) -> &[[[u8; DIGEST_BYTES]; 2]] {
        &self.decode
    }

    /// Serializes the garbled circuit.
    pub fn encode(&self, w: &mut Writer) {
        w.u8(self.label_bytes as u8);
        w.len(self.topology.n_inputs);
        w.len(self.topology.gates.len());
        for (shape, table) in self.topology.gates.iter().zip(&self.tables) {
            match *shape {
                GateShape::And(a, b) => {
                    w.u8(0);
                    w.len(a);
                    w.len(b);
                }
                GateShape::Xor(a, b) => {
                    w.u8(1);
                    w.len(a);
                    w.len(b);
                }
                GateShape::Not(a) => {
                    w.u8(2);
                    w.len(a);
                }
                GateShape::Const => w.u8(3),
            }
            match table {
                Table::Rows(rows) => rows.iter().for_each(|r| w.raw(r)),
                Table::Clear(l) => w.raw(l),
            }
        }
        w.len(self.topology.outputs.len());
        for (&o, d) in self.topology.outputs.iter().zip(&self.decode) {
            w.len(o);
            w.raw(&d[0]);
            w.raw(&d[1]);
        }
    }

    /// Parses a garbled circuit written by [`Self::encode`].
    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let label_bytes = r.u8()? as usize;
        if !(MIN_LABEL_BYTES..=MAX_LABEL_BYTES).contains(&label_bytes) {
            return Err(Error::Decode(format!(
                "label length {label_bytes} out of range"
            )));
        }
        let row = label_bytes + TAG_BYTES;
        let n_inputs = r.len(0)?;
        let count = r.len(1)?;
        let mut gates = Vec::with_capacity(count);
        let mut tables = Vec::with_capacity(count);
        for _ in 0..count {
            let kind = r.u8()?;
            let (shape, rows) = match kind {
                0 => (GateShape::And(r.len(0)?, r.len(0)?), 4),
                1 => (GateShape::Xor(r.len(0)?, r.len(0)?), 4),
                2 => (GateShape::Not(r.len(0)?), 2),
                3 => (GateShape::Const, 0),
                k => return Err(Error::Decode(format!("unknown gate kind {k}"))),
            };
            gates.push(shape);
            tables.push(if rows == 0 {
                Table::Clear(r.raw(label_bytes)?.to_vec())
            } else {
                Table::Rows(
                    (0..rows)
                        .map(|_| r.raw(row).map(<[u8]>::to_vec))
                        .collect::<Result<_>>()?,
                )
            });
        }
        let n_out = r.len(4 + 2 * DIGEST_BYTES)?;
        let mut outputs = Vec::with_capacity(n_out);
        let mut decode = Vec::with_capacity(n_out);
        for _ in 0..n_out {
            outputs.push(r.len(0)?);
            let d0: [u8; DIGEST_BYTES] = r.raw(DIGEST_BYTES)?.try_into().expect("digest");
            let d1: [u8; DIGEST_BYTES] = r.raw(DIGEST_BYTES)?.try_into().expect("digest");
            decode.push([d0, d1]);
        }
        let topology = Topology {
            n_inputs,
            gates,
            outputs,
        };
        validate(&topology).map_err(|e| Error::Decode(e.to_string()))?;
        Ok(Self {
            label_bytes,
            topology,
            tables,
            decode,
        })
    }
}

fn validate(t: &Topology) -> Result<()> {
    for (g, shape) in t.gates.iter().enumerate() {
        let id = t.n_inputs + g;
        let ops: &[usize] = match shape {
            GateShape::And(a, b) | GateShape::Xor(a, b) => &[*a, *b],
            GateShape::Not(a) => std::slice::from_ref(a),
            GateShape::Const => &[],
        };
        if ops.iter().any(|&w| w >= id) {
            return Err(Error::Circuit(format!("gate {id} reads a later wire")));
        }
    }
    if t.outputs.iter().any(|&o| o >= t.wire_count()) {
        return Err(Error::Circuit("output wire does not exist".into()));
    }
    Ok(())
}

fn check_label_bytes(label_bytes: usize) -> Result<()> {
    if (MIN_LABEL_BYTES..=MAX_LABEL_BYTES).contains(&label_bytes) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "label length must lie in {MIN_LABEL_BYTES}..={MAX_LABEL_BYTES} bytes, got {label_bytes}"
        )))
    }
}

fn random_pair<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> [Label; 2] {
    let mut l0 = vec![0u8; len];
    let mut l1 = vec![0u8; len];
    rng.fill_bytes(&mut l0);
    rng.fill_bytes(&mut l1);
    l1[0] = (l1[0] & !1) | ((l0[0] & 1) ^ 1);
    [l0, l1]
}

/// Garbles `c`, returning the garbled circuit and both labels of each input wire.
pub fn garble<R: RngCore + ?Sized>(
    c: &BoolCircuit,
    label_bytes: usize,
    rng: &mut R,
) -> Result<(GarbledCircuit, Vec<[Label; 2]>)> {
    check_label_bytes(label_bytes)?;
    let mut labels: Vec<[Label; 2]> = (0..c.n_inputs())
        .map(|_| random_pair(label_bytes, rng))
        .collect();
    let mut tables = Vec::with_capacity(c.gates().len());
    for (g, gate) in c.gates().iter().enumerate() {
        let gid = c.n_inputs() + g;
        let out = random_pair(label_bytes, rng);
        let table = match *gate {
            Gate::And(a, b) | Gate::Xor(a, b) => {
                let mut rows = vec![Vec::new(); 4];
                for va in 0..2 {
                    for vb in 0..2 {
                        let (la, lb) = (&labels[a][va], &labels[b][vb]);
                        let v = if matches!(gate, Gate::And(..)) {
                            va & vb
                        } else {
                            va ^ vb
                        };
                        rows[2 * select(la) + select(lb)] =
                            seal(row_pad(gid, &[la, lb], label_bytes), &out[v]);
                    }
                }
                Table::Rows(rows)
            }
            Gate::Not(a) => {
                let mut rows = vec![Vec::new(); 2];
                for va in 0..2 {
                    let la = &labels[a][va];
                    rows[select(la)] = seal(row_pad(gid, &[la], label_bytes), &out[1 - va]);
                }
                Table::Rows(rows)
            }
            Gate::Const(v) => Table::Clear(out[usize::from(v)].clone()),
        };
        tables.push(table);
        labels.push(out);
    }
    let decode = c
        .outputs()
        .iter()
        .map(|&o| [out_digest(o, &labels[o][0]), out_digest(o, &labels[o][1])])
        .collect();
    let inputs = labels.into_iter().take(c.n_inputs()).collect();
    Ok((
        GarbledCircuit {
            label_bytes,
            topology: c.topology(),
            tables,
            decode,
        },
        inputs,
    ))
}

/// Input labels selected by `x`.
pub fn labels_for(pairs: &[[Label; 2]], x: &BitVec) -> Result<Vec<Label>> {
    ensure_len(pairs.len(), x.len())?;
    Ok(pairs
        .iter()
        .zip(x.iter())
        .map(|(p, b)| p[usize::from(b)].clone())
        .collect())
}

/// Evaluates a garbled circuit on one label per input wire.
pub fn gc_eval(gc: &GarbledCircuit, labels: &[Label]) -> Result<BitVec> {
    let t = &gc.topology;
    ensure_len(t.n_inputs, labels.len())?;
    let lb = gc.label_bytes;
    if let Some(pos) = labels.iter().position(|l| l.len() != lb) {
        return Err(Error::GarbledEval(pos));
    }
    let mut wires: Vec<Label> = labels.to_vec();
    wires.reserve(t.gates.len());
    for (g, (shape, table)) in t.gates.iter().zip(&gc.tables).enumerate() {
        let gid = t.n_inputs + g;
        let label = match (shape, table) {
            (GateShape::And(a, b) | GateShape::Xor(a, b), Table::Rows(rows)) => {
                let (la, lb_) = (&wires[*a], &wires[*b]);
                open(
                    &rows[2 * select(la) + select(lb_)],
                    row_pad(gid, &[la, lb_], lb),
                    gid,
                )?
            }
            (GateShape::Not(a), Table::Rows(rows)) => {
                let la = &wires[*a];
                open(&rows[select(la)], row_pad(gid, &[la], lb), gid)?
            }
            (GateShape::Const, Table::Clear(l)) => l.clone(),
            _ => return Err(Error::GarbledEval(gid)),
        };
        wires.push(label);
    }
    let bits = t
        .outputs
        .iter()
        .zip(&gc.decode)
        .map(|(&o, d)| {
            let h = out_digest(o, &wires[o]);
            if h == d[0] {
                Ok(false)
            } else if h == d[1] {
                Ok(true)
            } else {
                Err(Error::GarbledEval(o))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVec::from_bools(&bits))
}

fn open(row: &[u8], pad: Vec<u8>, gid: usize) -> Result<Label> {
    let plain: Vec<u8> = row.iter().zip(&pad).map(|(r, p)| r ^ p).collect();
    let (label, tag) = plain.split_at(plain.len() - TAG_BYTES);
    if tag.iter().any(|&b| b != 0) {
        return Err(Error::GarbledEval(gid));
    }
    Ok(label.to_vec())
}

/// Simulates a garbled circuit and input labels that evaluate to `y`, from the wiring alone.
pub fn gc_simulate<R: Rng + ?Sized>(
    topology: &Topology,
    y: &BitVec,
    label_bytes: usize,
    rng: &mut R,
) -> Result<(GarbledCircuit, Vec<Label>)> {
    check_label_bytes(label_bytes)?;
    validate(topology)?;
    ensure_len(topology.outputs.len(), y.len())?;
    let fresh = |rng: &mut R| {
        let mut l = vec![0u8; label_bytes];
        rng.fill_bytes(&mut l);
        l
    };
    let row_len = label_bytes + TAG_BYTES;
    let mut active: Vec<Label> = (0..topology.n_inputs).map(|_| fresh(rng)).collect();
    let mut tables = Vec::with_capacity(topology.gates.len());
    for (g, shape) in topology.gates.iter().enumerate() {
        let gid = topology.n_inputs + g;
        let out = fresh(rng);
        let (n_rows, hot, keys): (usize, usize, Vec<&[u8]>) = match *shape {
            GateShape::And(a, b) | GateShape::Xor(a, b) => (
                4,
                2 * select(&active[a]) + select(&active[b]),
                vec![&active[a], &active[b]],
            ),
            GateShape::Not(a) => (2, select(&active[a]), vec![&active[a]]),
            GateShape::Const => (0, 0, vec![]),
        };
        let table = if n_rows == 0 {
            Table::Clear(out.clone())
        } else {
            let mut rows: Vec<Vec<u8>> = (0..n_rows)
                .map(|_| {
                    let mut r = vec![0u8; row_len];
                    rng.fill_bytes(&mut r);
                    r
                })
                .collect();
            rows[hot] = seal(row_pad(gid, &keys, label_bytes), &out);
            Table::Rows(rows)
        };
        tables.push(table);
        active.push(out);
    }
    let decode = topology
        .outputs
        .iter()
        .zip(y.iter())
        .map(|(&o, bit)| {
            let mut d = [[0u8; DIGEST_BYTES]; 2];
            d[usize::from(bit)] = out_digest(o, &active[o]);
            rng.fill_bytes(&mut d[usize::from(!bit)]);
            d
        })
        .collect();
    let inputs = active.into_iter().take(topology.n_inputs).collect();
    Ok((
        GarbledCircuit {
            label_bytes,
            topology: topology.clone(),
            tables,
            decode,
        },
        inputs,
    ))
}
