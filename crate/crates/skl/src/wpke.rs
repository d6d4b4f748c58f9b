//! Watermarkable PKE from `2ℓ` base keypairs.
//!
//! A message of `ℓ` bits is encrypted bit `j` under both `ek_{j,0}` and
//! `ek_{j,1}`; the key marked with `x` holds `dk_{j,x[j]}`. The extractor
//! plants opposite payloads in the two branches of each block and reads
//! the mark off whichever payload a decryptor returns.

use rand::RngCore;

use crate::bits::BitVec;
use crate::codec::{Reader, Writer};
use crate::error::{ensure_len, Error, Result};
use crate::garble::{CircuitBuilder, Wire};
use crate::pke::Pke;

/// `{ek_{j,b}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WpkeEk<P: Pke> {
    /// Per-position key pairs.
    pub eks: Vec<[P::Ek; 2]>,
}

/// `{dk_{j,b}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WpkeMsk<P: Pke> {
    /// Per-position key pairs.
    pub dks: Vec<[P::Dk; 2]>,
}

/// `dk(x) = (x, {dk_{j,x[j]}})`.
#[derive(Clone, Debug, PartialEq)]
pub struct WpkeDk<P: Pke> {
    /// The mark.
    pub x: BitVec,
    /// Selected per-position keys.
    pub dks: Vec<P::Dk>,
}

/// `{ct_{j,b}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WpkeCt<P: Pke> {
    /// Per-position ciphertext pairs.
    pub cts: Vec<[P::Ct; 2]>,
}

impl<P: Pke> WpkeEk<P> {
    /// Mark and message length `ℓ`.
    pub fn ell(&self) -> usize {
        self.eks.len()
    }

    /// Count-prefixed base keys.
    pub fn encode(&self, pke: &P, w: &mut Writer) {
        w.len(self.eks.len());
        for pair in &self.eks {
            for ek in pair {
                let mut inner = Writer::new();
                pke.encode_ek(ek, &mut inner);
                w.blob(&inner.into_bytes());
            }
        }
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(pke: &P, r: &mut Reader<'_>) -> Result<Self> {
        let ell = r.len(8)?;
        let eks = (0..ell)
            .map(|_| {
                Ok([
                    decode_blob(r, |r| pke.decode_ek(r))?,
                    decode_blob(r, |r| pke.decode_ek(r))?,
                ])
            })
            .collect::<Result<_>>()?;
        Ok(Self { eks })
    }
}

impl<P: Pke> WpkeMsk<P> {
    /// Mark length `ℓ`.
    pub fn ell(&self) -> usize {
        self.dks.len()
    }
}

impl<P: Pke> WpkeDk<P> {
    /// Width of [`Self::to_bits`] for mark length `ell`.
    pub fn bit_len(pke: &P, ell: usize) -> usize {
        ell * (1 + pke.dk_bits())
    }

    /// `x ‖ dk_1 ‖ … ‖ dk_ℓ`.
    pub fn to_bits(&self, pke: &P) -> BitVec {
        let mut out = self.x.clone();
        for dk in &self.dks {
            out.extend(&pke.dk_to_bits(dk));
        }
        out
    }

    /// Inverse of [`Self::to_bits`].
    pub fn from_bits(pke: &P, ell: usize, bits: &BitVec) -> Result<Self> {
        ensure_len(Self::bit_len(pke, ell), bits.len())?;
        let x = bits.slice(0, ell)?;
        let dks = bits
            .slice(ell, ell * pke.dk_bits())?
            .chunks(pke.dk_bits())?
            .iter()
            .map(|c| pke.dk_from_bits(c))
            .collect::<Result<_>>()?;
        Ok(Self { x, dks })
    }
}

impl<P: Pke> WpkeCt<P> {
    /// Message length `ℓ`.
    pub fn ell(&self) -> usize {
        self.cts.len()
    }

    /// Count-prefixed base ciphertexts.
    pub fn encode(&self, pke: &P, w: &mut Writer) {
        w.len(self.cts.len());
        for pair in &self.cts {
            for ct in pair {
                let mut inner = Writer::new();
                pke.encode_ct(ct, &mut inner);
                w.blob(&inner.into_bytes());
            }
        }
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(pke: &P, r: &mut Reader<'_>) -> Result<Self> {
        let ell = r.len(8)?;
        let cts = (0..ell)
            .map(|_| {
                Ok([
                    decode_blob(r, |r| pke.decode_ct(r))?,
                    decode_blob(r, |r| pke.decode_ct(r))?,
                ])
            })
            .collect::<Result<_>>()?;
        Ok(Self { cts })
    }
}

fn decode_blob<T>(r: &mut Reader<'_>, f: impl FnOnce(&mut Reader<'_>) -> Result<T>) -> Result<T> {
    let mut inner = Reader::new(r.blob()?);
    let v = f(&mut inner)?;
    inner.finish()?;
    Ok(v)
}

/// `2ℓ` independent base keypairs.
pub fn wpke_kg<P: Pke, R: RngCore + ?Sized>(
    pke: &P,
    ell: usize,
    rng: &mut R,
) -> Result<(WpkeEk<P>, WpkeMsk<P>)> {
    if ell == 0 {
        return Err(Error::InvalidParams("mark length must be positive".into()));
    }
    let (eks, dks) = (0..ell)
        .map(|_| {
            let (e0, d0) = pke.kg(rng);
            let (e1, d1) = pke.kg(rng);
            ([e0, e1], [d0, d1])
        })
        .unzip();
    Ok((WpkeEk { eks }, WpkeMsk { dks }))
}

/// The key marked with `x`.
pub fn wpke_mark<P: Pke>(msk: &WpkeMsk<P>, x: &BitVec) -> Result<WpkeDk<P>> {
    ensure_len(msk.ell(), x.len())?;
    Ok(WpkeDk {
        x: x.clone(),
        dks: msk
            .dks
            .iter()
            .zip(x.iter())
            .map(|(pair, b)| pair[usize::from(b)].clone())
            .collect(),
    })
}

/// Circuit form of [`wpke_mark`]: output wires for `dk(x).to_bits()`.
pub fn wpke_mark_circuit<P: Pke>(
    pke: &P,
    msk: &WpkeMsk<P>,
    b: &mut CircuitBuilder,
    x: &[Wire],
) -> Result<Vec<Wire>> {
    ensure_len(msk.ell(), x.len())?;
    let mut out = x.to_vec();
    for (pair, &bit) in msk.dks.iter().zip(x) {
        let d0 = b.constant(&pke.dk_to_bits(&pair[0]));
        let d1 = b.constant(&pke.dk_to_bits(&pair[1]));
        out.extend(b.mux_bits(bit, &d0, &d1));
    }
    Ok(out)
}

/// Encrypts `m_j` under both `ek_{j,0}` and `ek_{j,1}`.
pub fn wpke_enc<P: Pke, R: RngCore + ?Sized>(
    pke: &P,
    ek: &WpkeEk<P>,
    m: &BitVec,
    rng: &mut R,
) -> Result<WpkeCt<P>> {
    ensure_len(ek.ell(), m.len())?;
    let cts = ek
        .eks
        .iter()
        .zip(m.iter())
        .map(|(pair, bit)| [pke.enc(&pair[0], bit, rng), pke.enc(&pair[1], bit, rng)])
        .collect();
    Ok(WpkeCt { cts })
}

/// Decrypts with a marked key: `m_j = Dec(dk_j, ct_{j,x[j]})`.
pub fn wpke_dec<P: Pke>(pke: &P, dk: &WpkeDk<P>, ct: &WpkeCt<P>) -> Result<BitVec> {
    ensure_len(dk.x.len(), ct.ell())?;
    ensure_len(dk.x.len(), dk.dks.len())?;
    let bits = ct
        .cts
        .iter()
        .zip(&dk.dks)
        .zip(dk.x.iter())
        .map(|((pair, d), b)| pke.dec(d, &pair[usize::from(b)]))
        .collect::<Result<Vec<bool>>>()?;
    Ok(BitVec::from_bools(&bits))
}

/// Decrypts with the master key along the all-zero mark.
pub fn wpke_dec_msk<P: Pke>(pke: &P, msk: &WpkeMsk<P>, ct: &WpkeCt<P>) -> Result<BitVec> {
    wpke_dec(pke, &wpke_mark(msk, &BitVec::zeros(msk.ell()))?, ct)
}

/// Recovers one mark per instance from a single call to `decryptor`.
///
/// Block `(j, b)` of instance `i` carries payload `m_{i,j,b}` with
/// `m_{i,j,1} = 1 − m_{i,j,0}`; the recovered mark bit is the branch whose
/// payload came back. Missing output bits read as zero.
pub fn wpke_parallel_extract<P, R, F>(
    pke: &P,
    eks: &[WpkeEk<P>],
    decryptor: F,
    rng: &mut R,
) -> Vec<BitVec>
where
    P: Pke,
    R: RngCore + ?Sized,
    F: FnOnce(&[WpkeCt<P>]) -> Vec<BitVec>,
{
    let mut zero_payloads = Vec::with_capacity(eks.len());
    let cts: Vec<WpkeCt<P>> = eks
        .iter()
        .map(|ek| {
            let m0 = BitVec::random(ek.ell(), rng);
            let cts = ek
                .eks
                .iter()
                .zip(m0.iter())
                .map(|(pair, bit)| [pke.enc(&pair[0], bit, rng), pke.enc(&pair[1], !bit, rng)])
                .collect();
            zero_payloads.push(m0);
            WpkeCt { cts }
        })
        .collect();
    let answers = decryptor(&cts);
    zero_payloads
        .iter()
        .enumerate()
        .map(|(i, m0)| {
            let got = answers.get(i);
            let bits: Vec<bool> = (0..m0.len())
                .map(|j| got.is_some_and(|a| j < a.len() && a.get(j)) ^ m0.get(j))
                .collect();
            BitVec::from_bools(&bits)
        })
        .collect()
}
