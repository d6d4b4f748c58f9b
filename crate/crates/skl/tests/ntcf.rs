use std::collections::HashMap;

use proptest::prelude::*;
use skl::codec::{Reader, Writer};
use skl::garble::{circuit_eval, CircuitBuilder};
use skl::ntcf::{
    ntcf_chk, ntcf_func_gen, ntcf_good_set, ntcf_invert, ntcf_state_gen, NtcfMode, NtcfPp, NtcfTd,
    Preimage,
};
use skl::{gf2_inner, rng_from_seed, BitVec};

/// Preimage lists of every image point, by brute force over `{0,1}^w`.
fn preimages(pp: &NtcfPp) -> HashMap<u64, Vec<u64>> {
    let w = pp.w();
    let mut map: HashMap<u64, Vec<u64>> = HashMap::new();
    for x in 0..1u64 << w {
        map.entry(pp.eval(&BitVec::from_u64(x, w)).unwrap().to_u64())
            .or_default()
            .push(x);
    }
    map
}

#[test]
fn two_to_one_mode_has_exact_claws() {
    let mut rng = rng_from_seed(101);
    for w in [2usize, 4, 6] {
        for _ in 0..5 {
            let (pp, td) = ntcf_func_gen(w, NtcfMode::TwoToOne, &mut rng).unwrap();
            let delta = td.delta().unwrap().to_u64();
            assert_ne!(delta, 0);
            let map = preimages(&pp);
            assert_eq!(map.len(), 1 << (w - 1));
            for (y, xs) in &map {
                assert_eq!(xs.len(), 2, "w={w} y={y}");
                assert_eq!(xs[0] ^ xs[1], delta);
                let want = Preimage::Claw(BitVec::from_u64(xs[0], w), BitVec::from_u64(xs[1], w));
                assert_eq!(ntcf_invert(&td, &BitVec::from_u64(*y, w)), Some(want));
            }
        }
    }
}

#[test]
fn injective_mode_is_a_bijection() {
    let mut rng = rng_from_seed(102);
    for w in [2usize, 4, 6] {
        let (pp, td) = ntcf_func_gen(w, NtcfMode::Injective, &mut rng).unwrap();
        assert!(td.delta().is_none());
        assert_eq!(td.mode(), NtcfMode::Injective);
        let map = preimages(&pp);
        assert_eq!(map.len(), 1 << w);
        for (y, xs) in &map {
            assert_eq!(xs.len(), 1);
            assert_eq!(
                ntcf_invert(&td, &BitVec::from_u64(*y, w)),
                Some(Preimage::Single(BitVec::from_u64(xs[0], w)))
            );
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let seed = [7u8; 32];
    assert!(NtcfPp::two_to_one(4, seed, &BitVec::zeros(4)).is_err());
    assert!(NtcfPp::two_to_one(4, seed, &BitVec::zeros(3)).is_err());
    let mut rng = rng_from_seed(103);
    assert!(ntcf_func_gen(0, NtcfMode::TwoToOne, &mut rng).is_err());
    assert!(ntcf_func_gen(1, NtcfMode::TwoToOne, &mut rng).is_err());
    assert!(ntcf_func_gen(1, NtcfMode::Injective, &mut rng).is_err());
    assert!(ntcf_func_gen(66, NtcfMode::Injective, &mut rng).is_err());
}

#[test]
fn off_image_points_invert_to_nothing() {
    let mut rng = rng_from_seed(104);
    let w = 4;
    let (pp, td) = ntcf_func_gen(w, NtcfMode::TwoToOne, &mut rng).unwrap();
    let image = preimages(&pp);
    let mut off = 0;
    for y in 0..1u64 << w {
        let y = BitVec::from_u64(y, w);
        let inv = ntcf_invert(&td, &y);
        assert_eq!(inv.is_some(), image.contains_key(&y.to_u64()));
        off += usize::from(inv.is_none());
        if inv.is_none() {
            assert!(!ntcf_good_set(&td, &y, &BitVec::from_u64(1, w)));
        }
    }
    // Half of the range lies outside the image of a two-to-one map.
    assert_eq!(off, 1 << (w - 1));
    assert_eq!(ntcf_invert(&td, &BitVec::zeros(w + 2)), None);
}

#[test]
fn state_generation_produces_claw_states() {
    let mut rng = rng_from_seed(105);
    let (pp, td) = ntcf_func_gen(8, NtcfMode::TwoToOne, &mut rng).unwrap();
    let delta = td.delta().unwrap().clone();
    for _ in 0..50 {
        let (y, s) = ntcf_state_gen(&pp, &td, &mut rng).unwrap();
        assert_eq!(s.branch_count(), 2);
        let xs: Vec<&BitVec> = s
            .branches()
            .iter()
            .map(|b| b.registers.get("x").unwrap())
            .collect();
        assert!(xs.iter().all(|x| ntcf_chk(&pp, x, &y)));
        assert_ne!(xs[0], xs[1]);
        assert_eq!(xs[0].xor(xs[1]).unwrap(), delta);
        assert!(xs[0].to_u64() < xs[1].to_u64());
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| (a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12));
        assert_eq!(
            ntcf_invert(&td, &y),
            Some(Preimage::Claw(xs[0].clone(), xs[1].clone()))
        );
    }
    let (ipp, itd) = ntcf_func_gen(8, NtcfMode::Injective, &mut rng).unwrap();
    let (y, s) = ntcf_state_gen(&ipp, &itd, &mut rng).unwrap();
    assert_eq!(s.branch_count(), 1);
    assert!(ntcf_chk(
        &ipp,
        s.branches()[0].registers.get("x").unwrap(),
        &y
    ));
    assert!(ntcf_state_gen(&pp, &itd, &mut rng).is_err());
}

#[test]
fn single_bit_flips_off_a_claw_fail_unless_they_equal_delta() {
    let mut rng = rng_from_seed(106);
    let w = 4;
    for _ in 0..10 {
        let (pp, td) = ntcf_func_gen(w, NtcfMode::TwoToOne, &mut rng).unwrap();
        let delta = td.delta().unwrap().clone();
        for x in 0..1u64 << w {
            let x = BitVec::from_u64(x, w);
            let y = pp.eval(&x).unwrap();
            assert!(ntcf_chk(&pp, &x, &y));
            for i in 0..w {
                let mut x2 = x.clone();
                x2.flip(i);
                assert_eq!(ntcf_chk(&pp, &x2, &y), x2.xor(&x).unwrap() == delta);
            }
        }
        assert!(!ntcf_chk(&pp, &BitVec::zeros(w - 1), &BitVec::zeros(w)));
    }
}

#[test]
fn good_set_density_is_one_minus_two_to_minus_w() {
    let mut rng = rng_from_seed(107);
    for w in [2usize, 4, 6] {
        let (_, td) = ntcf_func_gen(w, NtcfMode::TwoToOne, &mut rng).unwrap();
        let (y, _) = ntcf_state_gen(td.pp(), &td, &mut rng).unwrap();
        let good = (0..1u64 << w)
            .filter(|&d| ntcf_good_set(&td, &y, &BitVec::from_u64(d, w)))
            .count();
        assert_eq!(good, (1 << w) - 1);
        assert!(!ntcf_good_set(&td, &y, &BitVec::zeros(w)));
    }
}

#[test]
fn hardcore_target_is_defined_by_delta() {
    let mut rng = rng_from_seed(108);
    let (pp, td) = ntcf_func_gen(10, NtcfMode::TwoToOne, &mut rng).unwrap();
    let delta = td.delta().unwrap();
    for _ in 0..100 {
        let (_, s) = ntcf_state_gen(&pp, &td, &mut rng).unwrap();
        let (x0, x1) = (
            s.branches()[0].registers.get("x").unwrap(),
            s.branches()[1].registers.get("x").unwrap(),
        );
        let d = BitVec::random(10, &mut rng);
        assert_eq!(
            gf2_inner(&d, &x0.xor(x1).unwrap()).unwrap(),
            gf2_inner(&d, delta).unwrap()
        );
    }
}

#[test]
fn parameter_format_is_mode_independent_and_round_trips() {
    let (pp1, td1) = ntcf_func_gen(8, NtcfMode::Injective, &mut rng_from_seed(109)).unwrap();
    let (pp2, td2) = ntcf_func_gen(8, NtcfMode::TwoToOne, &mut rng_from_seed(110)).unwrap();
    let bytes = |pp: &NtcfPp| {
        let mut w = Writer::new();
        pp.encode(&mut w);
        w.into_bytes()
    };
    assert_eq!(bytes(&pp1).len(), bytes(&pp2).len());
    for (pp, td) in [(pp1, td1), (pp2, td2)] {
        let b = bytes(&pp);
        assert_eq!(NtcfPp::decode(&mut Reader::new(&b)).unwrap(), pp);
        let mut w = Writer::new();
        td.encode(&mut w);
        let tb = w.into_bytes();
        assert_eq!(NtcfTd::decode(&mut Reader::new(&tb)).unwrap(), td);
        assert!(NtcfTd::decode(&mut Reader::new(&b)).is_err());
    }
}

#[test]
fn evaluation_circuit_matches_direct_evaluation() {
    let mut rng = rng_from_seed(111);
    for mode in [NtcfMode::Injective, NtcfMode::TwoToOne] {
        let (pp, _) = ntcf_func_gen(6, mode, &mut rng).unwrap();
        let mut b = CircuitBuilder::new(6);
        let xs = b.inputs();
        let ys = pp.eval_circuit(&mut b, &xs);
        let c = b.finish(&ys).unwrap();
        for x in 0..64 {
            let x = BitVec::from_u64(x, 6);
            assert_eq!(circuit_eval(&c, &x).unwrap(), pp.eval(&x).unwrap());
        }
    }
}

proptest! {
    #[test]
    fn claws_check_and_invert(seed: u64, half in 1usize..=16) {
        let w = 2 * half;
        let mut rng = rng_from_seed(seed);
        let (pp, td) = ntcf_func_gen(w, NtcfMode::TwoToOne, &mut rng).unwrap();
        let (y, s) = ntcf_state_gen(&pp, &td, &mut rng).unwrap();
        let x0 = s.branches()[0].registers.get("x").unwrap().clone();
        let x1 = s.branches()[1].registers.get("x").unwrap().clone();
        prop_assert!(ntcf_chk(&pp, &x0, &y) && ntcf_chk(&pp, &x1, &y));
        prop_assert_eq!(ntcf_invert(&td, &y), Some(Preimage::Claw(x0, x1)));
    }

    #[test]
    fn injective_inversion_is_exact(seed: u64, half in 1usize..=32) {
        let w = 2 * half;
        let mut rng = rng_from_seed(seed);
        let (pp, td) = ntcf_func_gen(w, NtcfMode::Injective, &mut rng).unwrap();
        let x = BitVec::random(w, &mut rng);
        prop_assert_eq!(ntcf_invert(&td, &pp.eval(&x).unwrap()), Some(Preimage::Single(x)));
    }
}
