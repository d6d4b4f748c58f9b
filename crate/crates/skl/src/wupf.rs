//! Two-key equivocal PRF and the watermarkable UPF built from it.
//!
//! The TEPRF here is an explicit-point construction: both keys share a PRF
//! seed and the differing point `s*`, and differ only in the bit returned at
//! `s*`. Equality off `s*` and disagreement on `s*` hold exactly; the
//! differing point is **not** hidden.
//!
//! The UPF has `w` TEPRF blocks over `ℓ`-bit inputs and a random mask `c`;
//! the key marked with `x` holds `key_{j, x[j] ⊕ c[j]}`.

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::bits::BitVec;
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::garble::{CircuitBuilder, Wire};

/// PRF seed length of a TEPRF key in bytes.
pub const TEPRF_SEED_BYTES: usize = 16;
const KEY_TAG: u8 = 0x31;
const KEY_FORMAT: &str = "toy-teprf";

/// One TEPRF key `(seed, s*, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeprfKey {
    /// Shared PRF seed.
    pub seed: [u8; TEPRF_SEED_BYTES],
    /// Differing point.
    pub s_star: BitVec,
    /// Output at the differing point.
    pub v: bool,
}

/// `(key₀, key₁)` for a differing point `s*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeprfKeyPair {
    /// The two keys; `keys[1].v = ¬keys[0].v`.
    pub keys: [TeprfKey; 2],
}

fn prf_bit(seed: &[u8], domain: &[u8], s: &BitVec) -> bool {
    let len = u32::try_from(s.len())
        .expect("input length fits u32")
        .to_le_bytes();
    let h = Sha256::new()
        .chain_update(domain)
        .chain_update(seed)
        .chain_update(len)
        .chain_update(s.as_bytes())
        .finalize();
    h[0] & 1 == 1
}

impl TeprfKey {
    /// Input length `ℓ`.
    pub fn ell(&self) -> usize {
        self.s_star.len()
    }

    /// Width of [`Self::to_bits`].
    pub fn bit_len(ell: usize) -> usize {
        TEPRF_SEED_BYTES * 8 + ell + 1
    }

    /// `seed ‖ s* ‖ v`.
    pub fn to_bits(&self) -> BitVec {
        let mut out = BitVec::from_bytes(&self.seed, TEPRF_SEED_BYTES * 8).expect("whole bytes");
        out.extend(&self.s_star);
        out.push(self.v);
        out
    }

    /// Inverse of [`Self::to_bits`].
    pub fn from_bits(ell: usize, bits: &BitVec) -> Result<Self> {
        ensure_len(Self::bit_len(ell), bits.len())?;
        let mut seed = [0u8; TEPRF_SEED_BYTES];
        seed.copy_from_slice(bits.slice(0, TEPRF_SEED_BYTES * 8)?.as_bytes());
        Ok(Self {
            seed,
            s_star: bits.slice(TEPRF_SEED_BYTES * 8, ell)?,
            v: bits.get(bits.len() - 1),
        })
    }
}

/// Samples `(key₀, key₁)` differing exactly at `s*`.
pub fn teprf_kg<R: RngCore + ?Sized>(s_star: &BitVec, rng: &mut R) -> TeprfKeyPair {
    let mut seed = [0u8; TEPRF_SEED_BYTES];
    rng.fill_bytes(&mut seed);
    let v0 = rng.next_u32() & 1 == 1;
    let key = |v| TeprfKey {
        seed,
        s_star: s_star.clone(),
        v,
    };
    TeprfKeyPair {
        keys: [key(v0), key(!v0)],
    }
}

/// `v` at the differing point, `PRF_seed(s)` elsewhere.
pub fn teprf_eval(key: &TeprfKey, s: &BitVec) -> Result<bool> {
    ensure_len(key.ell(), s.len())?;
    Ok(if s == &key.s_star {
        key.v
    } else {
        prf_bit(&key.seed, b"skl.teprf", s)
    })
}

/// `(c, {key_{j,b}})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WupfMsk {
    /// Equivocating mask.
    pub c: BitVec,
    /// One TEPRF pair per output bit.
    pub pairs: Vec<TeprfKeyPair>,
}

/// Extraction key: the master key plus the differing points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WupfXk {
    /// Equivocating mask.
    pub c: BitVec,
    /// `{s*_j}`.
    pub s_stars: Vec<BitVec>,
    /// One TEPRF pair per output bit.
    pub pairs: Vec<TeprfKeyPair>,
}

/// An evaluation key: one TEPRF key per output bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WupfKey {
    /// Per-block keys.
    pub keys: Vec<TeprfKey>,
}

impl WupfMsk {
    /// Output length `w`.
    pub fn w(&self) -> usize {
        self.pairs.len()
    }

    /// Block input length `ℓ`.
    pub fn ell(&self) -> usize {
        self.pairs.first().map_or(0, |p| p.keys[0].ell())
    }

    /// The master evaluation key `{key_{j,0}}`.
    pub fn eval_key(&self) -> WupfKey {
        WupfKey {
            keys: self.pairs.iter().map(|p| p.keys[0].clone()).collect(),
        }
    }
}

impl WupfXk {
    /// The master key inside.
    pub fn msk(&self) -> WupfMsk {
        WupfMsk {
            c: self.c.clone(),
            pairs: self.pairs.clone(),
        }
    }

    /// `s*_1 ‖ … ‖ s*_w`, where every block disagrees between the two keys.
    pub fn challenge(&self) -> BitVec {
        BitVec::concat_all(&self.s_stars)
    }
}

impl WupfKey {
    /// Output length `w`.
    pub fn w(&self) -> usize {
        self.keys.len()
    }

    /// Block input length `ℓ`.
    pub fn ell(&self) -> usize {
        self.keys.first().map_or(0, TeprfKey::ell)
    }

    /// Width of [`Self::to_bits`].
    pub fn bit_len(w: usize, ell: usize) -> usize {
        w * TeprfKey::bit_len(ell)
    }

    /// Concatenated block keys.
    pub fn to_bits(&self) -> BitVec {
        BitVec::concat_all(&self.keys.iter().map(TeprfKey::to_bits).collect::<Vec<_>>())
    }

    /// Inverse of [`Self::to_bits`].
    pub fn from_bits(w: usize, ell: usize, bits: &BitVec) -> Result<Self> {
        ensure_len(Self::bit_len(w, ell), bits.len())?;
        let keys = bits
            .chunks(TeprfKey::bit_len(ell))?
            .iter()
            .map(|c| TeprfKey::from_bits(ell, c))
            .collect::<Result<_>>()?;
        Ok(Self { keys })
    }

    /// Tagged record list `(seed, s*, v)` per block.
    pub fn encode(&self, w: &mut Writer) {
        w.u8(KEY_TAG);
        w.str(KEY_FORMAT);
        w.len(self.keys.len());
        for k in &self.keys {
            w.raw(&k.seed);
            w.bits(&k.s_star);
            w.u8(u8::from(k.v));
        }
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        if r.u8()? != KEY_TAG || r.str()? != KEY_FORMAT {
            return Err(Error::Decode("not a toy-TEPRF key".into()));
        }
        let count = r.len(TEPRF_SEED_BYTES + 5)?;
        let keys = (0..count)
            .map(|_| {
                let seed: [u8; TEPRF_SEED_BYTES] =
                    r.raw(TEPRF_SEED_BYTES)?.try_into().expect("fixed length");
                let s_star = r.bits()?;
                let v = match r.u8()? {
                    0 => false,
                    1 => true,
                    b => return Err(Error::Decode(format!("TEPRF bit byte {b}"))),
                };
                Ok(TeprfKey { seed, s_star, v })
            })
            .collect::<Result<Vec<_>>>()?;
        if keys.windows(2).any(|p| p[0].ell() != p[1].ell()) {
            return Err(Error::Decode("TEPRF blocks differ in input length".into()));
        }
        Ok(Self { keys })
    }
}

/// Samples `s*_j`, `c` and `w` TEPRF pairs.
pub fn wupf_kg<R: RngCore + ?Sized>(
    w: usize,
    ell: usize,
    rng: &mut R,
) -> Result<(WupfMsk, WupfXk)> {
    if w == 0 || ell == 0 {
        return Err(Error::InvalidParams(
            "UPF dimensions must be positive".into(),
        ));
    }
    let s_stars: Vec<BitVec> = (0..w).map(|_| BitVec::random(ell, rng)).collect();
    let c = BitVec::random(w, rng);
    let pairs: Vec<TeprfKeyPair> = s_stars.iter().map(|s| teprf_kg(s, rng)).collect();
    Ok((
        WupfMsk {
            c: c.clone(),
            pairs: pairs.clone(),
        },
        WupfXk { c, s_stars, pairs },
    ))
}

/// `{key_{j, x[j] ⊕ c[j]}}`.
pub fn wupf_mark(msk: &WupfMsk, x: &BitVec) -> Result<WupfKey> {
    ensure_len(msk.w(), x.len())?;
    let keys = msk
        .pairs
        .iter()
        .enumerate()
        .map(|(j, p)| p.keys[usize::from(x.get(j) ^ msk.c.get(j))].clone())
        .collect();
    Ok(WupfKey { keys })
}

/// Circuit form of [`wupf_mark`]: output wires for `key(x).to_bits()`.
pub fn wupf_mark_circuit(msk: &WupfMsk, b: &mut CircuitBuilder, x: &[Wire]) -> Result<Vec<Wire>> {
    ensure_len(msk.w(), x.len())?;
    let mut out = Vec::with_capacity(WupfKey::bit_len(msk.w(), msk.ell()));
    for (j, (p, &bit)) in msk.pairs.iter().zip(x).enumerate() {
        let sel = b.xor(bit, Wire::Const(msk.c.get(j)));
        let k0 = b.constant(&p.keys[0].to_bits());
        let k1 = b.constant(&p.keys[1].to_bits());
        out.extend(b.mux_bits(sel, &k0, &k1));
    }
    Ok(out)
}

/// `t_j = Eval(key_j, s_j)` over the `w` blocks of `s`.
pub fn wupf_eval(key: &WupfKey, s: &BitVec) -> Result<BitVec> {
    let ell = key.ell();
    ensure_len(key.w() * ell, s.len())?;
    let blocks = s.chunks(ell.max(1))?;
    let bits = key
        .keys
        .iter()
        .zip(&blocks)
        .map(|(k, sj)| teprf_eval(k, sj))
        .collect::<Result<Vec<bool>>>()?;
    Ok(BitVec::from_bools(&bits))
}

/// Recovers one mark per instance from a single call to `predictor` on the challenge inputs.
///
/// `d_i[j] = 0` iff the prediction matches `key_{i,j,0}` at `s*_{i,j}`; the
/// mark bit is `d_i[j] ⊕ c_i[j]`. Missing output bits read as zero.
pub fn wupf_parallel_extract<F>(xks: &[WupfXk], predictor: F) -> Vec<BitVec>
where
    F: FnOnce(&[BitVec]) -> Vec<BitVec>,
{
    let challenges: Vec<BitVec> = xks.iter().map(WupfXk::challenge).collect();
    let answers = predictor(&challenges);
    xks.iter()
        .enumerate()
        .map(|(i, xk)| {
            let got = answers.get(i);
            let bits: Vec<bool> = xk
                .pairs
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let t = got.is_some_and(|a| j < a.len() && a.get(j));
                    (t != p.keys[0].v) ^ xk.c.get(j)
                })
                .collect();
            BitVec::from_bools(&bits)
        })
        .collect()
}

/// Output of [`wupf_sim`]: the handed-out key and what is needed to explain it later.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WupfSimulation {
    /// The simulated key `{key_{j, c*[j]}}`.
    pub key: WupfKey,
    /// The simulator's mask `c*`.
    pub c_star: BitVec,
    /// The TEPRF pairs.
    pub pairs: Vec<TeprfKeyPair>,
}

impl WupfSimulation {
    /// A master key under which the simulated key is the key marked with `x`: `c = c* ⊕ x`.
    pub fn explain(&self, x: &BitVec) -> Result<WupfMsk> {
        Ok(WupfMsk {
            c: self.c_star.xor(x)?,
            pairs: self.pairs.clone(),
        })
    }
}

/// Equivocation simulator: fresh pairs and mask `c*`, handing out `{key_{j, c*[j]}}`.
pub fn wupf_sim<R: RngCore + ?Sized>(w: usize, ell: usize, rng: &mut R) -> Result<WupfSimulation> {
    let (msk, _) = wupf_kg(w, ell, rng)?;
    let c_star = msk.c;
    let key = WupfKey {
        keys: msk
            .pairs
            .iter()
            .zip(c_star.iter())
            .map(|(p, b)| p.keys[usize::from(b)].clone())
            .collect(),
    };
    Ok(WupfSimulation {
        key,
        c_star,
        pairs: msk.pairs,
    })
}

/// UPF output XORed with an independent PRF, for use as a plain UPF.
pub fn wupf_xor_eval(
    key: &WupfKey,
    prf_seed: &[u8; TEPRF_SEED_BYTES],
    s: &BitVec,
) -> Result<BitVec> {
    let t = wupf_eval(key, s)?;
    let mask: Vec<bool> = (0..t.len())
        .map(|j| {
            let mut tagged = s.clone();
            tagged.extend(&BitVec::from_u64(j as u64, 32));
            prf_bit(prf_seed, b"skl.upf-xor", &tagged)
        })
        .collect();
    t.xor(&BitVec::from_bools(&mask))
}
