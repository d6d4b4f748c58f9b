//! Gadget trapdoors: generation, LWE inversion and the messiness test.
//!
//! `A = [Ā | G − Ā·R]` with `Ā` uniform, `R ∈ {−1,0,1}^{m̄×nk}` and
//! `G = I_n ⊗ (1, 2, …, 2^{k−1})`, so that `A·[R; I] = G`. Given
//! `v = sᵀA + eᵀ`, the product `v·[R; I] = sᵀG + eᵀ[R; I]` is decoded one
//! coordinate of `s` at a time by successive halving from the most
//! significant gadget entry, after which the residual `e = v − sᵀA` is checked
//! against the acceptance radius.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore};

use super::params::LatticeParams;
use super::scalar::{Modulus, Scalar};
use super::vector::{ModQMatrix, ModQVector};
use crate::error::{ensure_len, Error, Result};

const FRACTION_BITS: u32 = 8;

/// A matrix together with its gadget trapdoor `R`.
#[derive(Clone, Debug)]
pub struct GadgetTrapdoor<S: Scalar> {
    a: Arc<ModQMatrix<S>>,
    r_t: Arc<Vec<i8>>,
    m_bar: usize,
    nk: usize,
}

impl<S: Scalar> GadgetTrapdoor<S> {
    /// The public matrix `A` (n×m).
    pub fn matrix(&self) -> &ModQMatrix<S> {
        &self.a
    }

    /// Shared handle to `A`.
    pub fn matrix_arc(&self) -> Arc<ModQMatrix<S>> {
        Arc::clone(&self.a)
    }

    /// Entry `R[row][col]`.
    pub fn r(&self, row: usize, col: usize) -> i8 {
        self.r_t[col * self.m_bar + row]
    }
}

/// Samples `A` with a gadget trapdoor.
pub fn trap_gen<S: Scalar, R: RngCore + ?Sized>(
    p: &LatticeParams<S>,
    rng: &mut R,
) -> GadgetTrapdoor<S> {
    let md = p.modulus();
    let (n, m, k, m_bar) = (p.n(), p.m(), p.k(), p.m_bar());
    let nk = n * k;
    let a_bar = ModQMatrix::random(md, n, m_bar, rng);
    let r_t: Vec<i8> = (0..nk * m_bar).map(|_| rng.gen_range(-1i8..=1)).collect();
    let mut data = Vec::with_capacity(n * m);
    let mut pow2 = Vec::with_capacity(k);
    let mut p2 = S::one();
    for _ in 0..k {
        pow2.push(p2.clone());
        p2 = md.add(&p2, &p2);
    }
    for i in 0..n {
        data.extend_from_slice(a_bar.row(i));
        let ar = S::ternary_mat_vec(a_bar.row(i), &r_t, nk, md.q());
        for (c, arc) in ar.iter().enumerate() {
            let g = if c / k == i {
                pow2[c % k].clone()
            } else {
                S::zero()
            };
            data.push(md.sub(&g, arc));
        }
    }
    let a = ModQMatrix::from_rows(n, m, data).expect("dimensions are consistent");
    GadgetTrapdoor {
        a: Arc::new(a),
        r_t: Arc::new(r_t),
        m_bar,
        nk,
    }
}

/// Recovers `(s, e)` from `v = sᵀA + eᵀ` when `‖e‖₂` is within [`LatticeParams::invert_bound`]; `None` otherwise.
pub fn invert_lwe<S: Scalar>(
    p: &LatticeParams<S>,
    td: &GadgetTrapdoor<S>,
    v: &ModQVector<S>,
) -> Result<Option<(ModQVector<S>, ModQVector<S>)>> {
    ensure_len(p.m(), v.len())?;
    ensure_len(td.a.cols(), v.len())?;
    let md = p.modulus();
    let (n, k) = (p.n(), p.k());
    let (v1, v2) = v.entries().split_at(td.m_bar);
    let mut y = S::ternary_mat_vec(v1, &td.r_t, td.nk, md.q());
    for (yc, v2c) in y.iter_mut().zip(v2) {
        *yc = md.add(yc, v2c);
    }
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let block = &y[i * k..(i + 1) * k];
        let si = decode_gadget(md, block);
        let mut x = si.clone();
        for yj in block {
            if md.centered_abs(&md.sub(yj, &x)) > *md.quarter() {
                return Ok(None);
            }
            x = md.add(&x, &x);
        }
        s.push(si);
    }
    let s = ModQVector::from_entries(s);
    let e = v.sub(md, &td.a.left_mul(md, &s)?)?;
    if e.norm2_sq(md).sqrt() <= p.invert_bound() {
        Ok(Some((s, e)))
    } else {
        Ok(None)
    }
}

/// `1` when the branch keyed by `v` is certifiably messy (inversion fails); requires a preset with the τ bound.
pub fn is_messy<S: Scalar>(
    p: &LatticeParams<S>,
    td: &GadgetTrapdoor<S>,
    v: &ModQVector<S>,
) -> Result<bool> {
    if !p.messy_certified() {
        return Err(Error::Unsupported(format!(
            "messiness is not certified under preset {:?} (τ below √(qm)·log²m)",
            p.name()
        )));
    }
    Ok(invert_lwe(p, td, v)?.is_none())
}

/// Decodes `s` from `yⱼ ≈ s·2^j mod q`, `j = 0..k`, by halving from the top entry.
///
/// The running estimate of `s·2^j mod q` carries 8 fractional bits. Each step
/// picks the halving candidate, `x/2` or `(x+q)/2`, that is circularly nearest
/// to `yⱼ`; the estimate error halves with every step.
fn decode_gadget<S: Scalar>(md: &Modulus<S>, ys: &[S]) -> S {
    let k = ys.len();
    if k == 0 {
        return S::zero();
    }
    if md.bits() <= 100 {
        let q = md.q().to_i128().expect("q below 2^100");
        let scale = 1i128 << FRACTION_BITS;
        let qs = q * scale;
        let mut est = ys[k - 1].to_i128().expect("reduced") * scale;
        for yj in ys[..k - 1].iter().rev() {
            let target = yj.to_i128().expect("reduced") * scale;
            let pick = |b: i128| {
                let c = (est + b * qs + 1) >> 1;
                let d = (c - target).rem_euclid(qs);
                (c, d.min(qs - d))
            };
            let (c0, d0) = pick(0);
            let (c1, d1) = pick(1);
            est = if d0 <= d1 { c0 } else { c1 };
        }
        let s = ((est + scale / 2) >> FRACTION_BITS).rem_euclid(q);
        return md.from_i128(s);
    }
    let q = BigInt::from(md.q_big().clone());
    let scale = BigInt::one() << FRACTION_BITS;
    let qs = &q * &scale;
    let mut est = BigInt::from(ys[k - 1].to_big()) * &scale;
    for yj in ys[..k - 1].iter().rev() {
        let target = BigInt::from(yj.to_big()) * &scale;
        let pick = |b: bool| {
            let num = if b { &est + &qs } else { est.clone() };
            let c: BigInt = (num + 1) >> 1;
            let d = (&c - &target).mod_floor(&qs);
            let alt = &qs - &d;
            let dist = if d < alt { d } else { alt };
            (c, dist)
        };
        let (c0, d0) = pick(false);
        let (c1, d1) = pick(true);
        est = if d0 <= d1 { c0 } else { c1 };
    }
    let s: BigInt = (est + (&scale >> 1u32)) >> FRACTION_BITS;
    let s = s.mod_floor(&q);
    debug_assert!(!s.is_negative() || s.is_zero());
    md.from_bigint(&s)
}
