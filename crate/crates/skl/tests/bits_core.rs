use proptest::prelude::*;
use rand::Rng;
use skl::{block_recompose, coset_sample, gf2_inner, rng_from_seed, BitVec, BlockTable, Error};

fn bv(s: &str) -> BitVec {
    s.parse().unwrap()
}

fn bits(len: usize) -> impl Strategy<Value = BitVec> {
    proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVec::from_bools(&b))
}

fn equal_pair(max: usize) -> impl Strategy<Value = (BitVec, BitVec, BitVec)> {
    (0..=max).prop_flat_map(|l| (bits(l), bits(l), bits(l)))
}

fn random_table<R: Rng>(w: usize, u: usize, rng: &mut R) -> BlockTable {
    let entries = (0..w)
        .map(|_| [BitVec::random(u, rng), BitVec::random(u, rng)])
        .collect();
    BlockTable::new(u, entries).unwrap()
}

/// `d*[j] = ⟨c_j, α_j⁰ ⊕ α_j¹⟩`, computed independently of `BlockTable::correction`.
fn d_star(t: &BlockTable, c: &BitVec) -> BitVec {
    let u = t.u();
    let d: Vec<bool> = (0..t.w())
        .map(|j| {
            let cj = c.slice(j * u, u).unwrap();
            let delta = t.entry(j, false).xor(t.entry(j, true)).unwrap();
            gf2_inner(&cj, &delta).unwrap()
        })
        .collect();
    BitVec::from_bools(&d)
}

fn identity_holds(t: &BlockTable, x0: &BitVec, x1: &BitVec, c: &BitVec) -> bool {
    let lhs = gf2_inner(
        c,
        &block_recompose(t, x0)
            .unwrap()
            .xor(&block_recompose(t, x1).unwrap())
            .unwrap(),
    )
    .unwrap();
    let rhs = gf2_inner(&d_star(t, c), &x0.xor(x1).unwrap()).unwrap();
    lhs == rhs
}

#[test]
fn inner_product_examples() {
    assert!(gf2_inner(&bv("101"), &bv("110")).unwrap());
    for x in ["0000", "1011", "1111"] {
        assert!(!gf2_inner(&bv("0000"), &bv(x)).unwrap());
    }
    assert!(!gf2_inner(&bv("1111"), &bv("1111")).unwrap());
}

#[test]
fn inner_product_rejects_length_mismatch() {
    assert!(matches!(
        gf2_inner(&bv("10"), &bv("101")),
        Err(Error::LengthMismatch { .. })
    ));
}

#[test]
fn recompose_examples() {
    let t = BlockTable::new(2, vec![[bv("00"), bv("11")], [bv("01"), bv("10")]]).unwrap();
    assert_eq!(block_recompose(&t, &bv("10")).unwrap(), bv("1101"));
    assert_eq!(block_recompose(&t, &bv("00")).unwrap(), bv("0001"));
    let empty = BlockTable::new(0, vec![[BitVec::zeros(0), BitVec::zeros(0)]; 2]).unwrap();
    assert_eq!(block_recompose(&empty, &bv("11")).unwrap().len(), 0);
    assert!(block_recompose(&t, &bv("101")).is_err());
}

#[test]
fn block_table_rejects_ragged_entries() {
    assert!(BlockTable::new(2, vec![[bv("00"), bv("1")]]).is_err());
}

#[test]
fn coset_sample_example_enumerates_the_even_coset() {
    let mut rng = rng_from_seed(21);
    let mut counts = [0usize; 8];
    for _ in 0..8000 {
        counts[coset_sample(&bv("010"), false, &mut rng).unwrap().to_u64() as usize] += 1;
    }
    // Little-endian integers of 000, 001, 100, 101 (bit 1 clear).
    for (v, &c) in counts.iter().enumerate() {
        if v & 0b010 == 0 {
            assert!((1800..2200).contains(&c), "{v}: {c}");
        } else {
            assert_eq!(c, 0);
        }
    }
}

#[test]
fn zero_delta_is_uniform_or_empty() {
    let mut rng = rng_from_seed(22);
    let zero = BitVec::zeros(3);
    let mut seen = [false; 8];
    for _ in 0..400 {
        seen[coset_sample(&zero, false, &mut rng).unwrap().to_u64() as usize] = true;
    }
    assert!(seen.iter().all(|&s| s));
    assert_eq!(coset_sample(&zero, true, &mut rng), Err(Error::EmptyCoset));
}

/// Pearson χ² against the uniform distribution on each coset, for every nonzero `delta` with `L ≤ 4`.
#[test]
fn coset_sample_is_uniform_chi_squared() {
    let mut rng = rng_from_seed(23);
    let samples = 4000;
    for len in 1..=4usize {
        for raw in 1..(1u64 << len) {
            let delta = BitVec::from_u64(raw, len);
            for theta in [false, true] {
                let size = 1usize << (len - 1);
                let mut counts = vec![0usize; 1 << len];
                for _ in 0..samples {
                    let w = coset_sample(&delta, theta, &mut rng).unwrap();
                    assert_eq!(gf2_inner(&w, &delta).unwrap(), theta);
                    counts[w.to_u64() as usize] += 1;
                }
                let expect = samples as f64 / size as f64;
                let chi2: f64 = (0..1u64 << len)
                    .filter(|&v| gf2_inner(&BitVec::from_u64(v, len), &delta).unwrap() == theta)
                    .map(|v| (counts[v as usize] as f64 - expect).powi(2) / expect)
                    .sum();
                // 99.9% quantile of χ² with at most 7 degrees of freedom is 24.3.
                assert!(
                    chi2 < 24.3,
                    "L={len} delta={delta} theta={theta}: χ²={chi2}"
                );
            }
        }
    }
}

fn parity(v: u64) -> bool {
    v.count_ones() % 2 == 1
}

/// Checks the identity for every `(x0, x1, c)` on one table, using library outputs read as integers.
fn check_all_inputs(t: &BlockTable) {
    let (w, u) = (t.w(), t.u());
    let recomposed: Vec<u64> = (0..1u64 << w)
        .map(|x| {
            block_recompose(t, &BitVec::from_u64(x, w))
                .unwrap()
                .to_u64()
        })
        .collect();
    let corrections: Vec<u64> = (0..1u64 << (w * u))
        .map(|c| t.correction(&BitVec::from_u64(c, w * u)).unwrap().to_u64())
        .collect();
    for x0 in 0..1u64 << w {
        for x1 in 0..1u64 << w {
            let diff = recomposed[x0 as usize] ^ recomposed[x1 as usize];
            for (c, &d) in corrections.iter().enumerate() {
                assert_eq!(
                    parity(c as u64 & diff),
                    parity(d & (x0 ^ x1)),
                    "w={w} u={u} x0={x0} x1={x1} c={c}"
                );
            }
        }
    }
}

fn table_from(w: usize, u: usize, alpha0: u64, delta: u64) -> BlockTable {
    let at = |v: u64, j: usize| BitVec::from_u64(v >> (j * u), u);
    let entries = (0..w)
        .map(|j| [at(alpha0, j), at(alpha0 ^ delta, j)])
        .collect();
    BlockTable::new(u, entries).unwrap()
}

/// Every table, `x0`, `x1` and `c` for `w, u ≤ 3`. At `w = u = 3` the `2^18` tables are
/// covered as all `2^9` differences `α⁰ ⊕ α¹` over eight fixed `α⁰` halves.
#[test]
fn block_identity_exhaustive_small() {
    let mut rng = rng_from_seed(25);
    for w in 1..=3usize {
        for u in 0..=3usize {
            let half = w * u;
            let alpha0s: Vec<u64> = if 2 * half <= 12 {
                (0..1u64 << half).collect()
            } else {
                (0..8).map(|_| rng.gen_range(0..1u64 << half)).collect()
            };
            for &alpha0 in &alpha0s {
                for delta in 0..1u64 << half {
                    let t = table_from(w, u, alpha0, delta);
                    check_all_inputs(&t);
                }
            }
        }
    }
    // The integer reading agrees with the direct computation on a sample.
    let t = table_from(3, 3, 0b101_110_011, 0b011_001_111);
    for (x0, x1, c) in [(0b101, 0b010, 0b110_011_101), (0b111, 0b111, 0b1)] {
        let (x0, x1, c) = (
            BitVec::from_u64(x0, 3),
            BitVec::from_u64(x1, 3),
            BitVec::from_u64(c, 9),
        );
        assert!(identity_holds(&t, &x0, &x1, &c));
    }
}

#[test]
fn block_identity_random_ten_thousand() {
    let mut rng = rng_from_seed(24);
    for _ in 0..10_000 {
        let (w, u) = (rng.gen_range(1..=24), rng.gen_range(1..=40));
        let t = random_table(w, u, &mut rng);
        let x0 = BitVec::random(w, &mut rng);
        let x1 = BitVec::random(w, &mut rng);
        let c = BitVec::random(w * u, &mut rng);
        assert!(identity_holds(&t, &x0, &x1, &c));
        assert_eq!(t.correction(&c).unwrap(), d_star(&t, &c));
    }
}

proptest! {
    #[test]
    fn inner_product_is_bilinear((a, a2, b) in equal_pair(200)) {
        let lhs = gf2_inner(&a.xor(&a2).unwrap(), &b).unwrap();
        prop_assert_eq!(lhs, gf2_inner(&a, &b).unwrap() ^ gf2_inner(&a2, &b).unwrap());
        prop_assert_eq!(gf2_inner(&a, &b).unwrap(), gf2_inner(&b, &a).unwrap());
    }

    #[test]
    fn coset_contract(delta in (1usize..100).prop_flat_map(bits), theta: bool, seed: u64) {
        let mut rng = rng_from_seed(seed);
        match coset_sample(&delta, theta, &mut rng) {
            Ok(w) => {
                prop_assert_eq!(w.len(), delta.len());
                prop_assert_eq!(gf2_inner(&w, &delta).unwrap(), theta);
            }
            Err(e) => {
                prop_assert!(delta.is_zero() && theta);
                prop_assert_eq!(e, Error::EmptyCoset);
            }
        }
    }

    #[test]
    fn string_and_byte_forms_round_trip(b in (0usize..300).prop_flat_map(bits)) {
        prop_assert_eq!(b.to_string().parse::<BitVec>().unwrap(), b.clone());
        prop_assert_eq!(BitVec::from_bytes(b.as_bytes(), b.len()).unwrap(), b.clone());
        prop_assert_eq!(b.as_bytes().len(), b.len().div_ceil(8));
    }

    #[test]
    fn xor_is_an_involution((a, b, _) in equal_pair(200)) {
        prop_assert_eq!(a.xor(&b).unwrap().xor(&b).unwrap(), a);
    }

    #[test]
    fn recompose_length_and_selection(w in 1usize..8, u in 0usize..8, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let t = random_table(w, u, &mut rng);
        let x = BitVec::random(w, &mut rng);
        let r = block_recompose(&t, &x).unwrap();
        prop_assert_eq!(r.len(), w * u);
        for j in 0..w {
            prop_assert_eq!(&r.slice(j * u, u).unwrap(), t.entry(j, x.get(j)));
        }
    }
}
