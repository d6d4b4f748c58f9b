use std::f64::consts::FRAC_1_SQRT_2;

use proptest::prelude::*;
use skl::branch::{BranchState, Registers};
use skl::codec::{Reader, Writer};
use skl::modq::{demo, full, invert_lwe, LatticeParams, ModQVector, Scalar};
use skl::ot::{
    decode_msg1, encode_msg1, ot_coherent_receive1, ot_crs_gen, ot_extract, ot_receive1,
    ot_receive2, ot_send, ot_send_bit, ot_simulate_send, ot_sta_rcv, state_bits, Mode, OtMsg2,
    OtReceiverState,
};
use skl::{rng_from_seed, BitVec, Error};

fn pipeline<S: Scalar>(p: &LatticeParams<S>, mode: Mode, seed: u64) -> bool {
    let mut rng = rng_from_seed(seed);
    let (crs, _) = ot_crs_gen(p, mode, &mut rng);
    (0..8u8).all(|case| {
        let (b, z0, z1) = (case & 1 == 1, case & 2 == 2, case & 4 == 4);
        let (msg1, st) = ot_receive1(p, &crs, b, &mut rng);
        let msg2 = ot_send_bit(p, &crs, &msg1, z0, z1, &mut rng).unwrap();
        ot_receive2(p, b, &st, &msg2).unwrap().get(0) == if b { z1 } else { z0 }
    })
}

fn plus_state() -> BranchState {
    BranchState::make_state(vec![
        (
            FRAC_1_SQRT_2,
            Registers::single("b", BitVec::from_bools(&[false])),
        ),
        (
            FRAC_1_SQRT_2,
            Registers::single("b", BitVec::from_bools(&[true])),
        ),
    ])
    .unwrap()
}

#[test]
fn hiding_crs_is_planted_and_extractable_crs_is_not() {
    let p = demo();
    let mut rng = rng_from_seed(41);
    let (crs, td) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    assert!(invert_lwe(&p, td.gadget(), crs.v()).unwrap().is_some());
    let mut failures = 0;
    for _ in 0..100 {
        let (crs, td) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
        failures += usize::from(invert_lwe(&p, td.gadget(), crs.v()).unwrap().is_none());
    }
    assert!(failures >= 99, "{failures}");
}

#[test]
fn crs_generation_is_deterministic() {
    let p = demo();
    for mode in [Mode::Hiding, Mode::Extractable] {
        let a = ot_crs_gen(&p, mode, &mut rng_from_seed(42)).0;
        let b = ot_crs_gen(&p, mode, &mut rng_from_seed(42)).0;
        assert_eq!(a, b);
    }
    assert_ne!(
        ot_crs_gen(&p, Mode::Hiding, &mut rng_from_seed(42)).0,
        ot_crs_gen(&p, Mode::Hiding, &mut rng_from_seed(43)).0
    );
}

#[test]
fn mode_numbers_round_trip() {
    assert_eq!(Mode::Extractable.number(), 1);
    assert_eq!(Mode::Hiding.number(), 2);
    for mode in [Mode::Extractable, Mode::Hiding] {
        assert_eq!(Mode::from_number(mode.number()).unwrap(), mode);
    }
    assert!(Mode::from_number(0).is_err());
    assert!(Mode::from_number(3).is_err());
}

#[test]
fn first_message_matches_its_definition() {
    let p = demo();
    let md = p.modulus();
    let mut rng = rng_from_seed(44);
    let (crs, _) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
    for b in [false, true] {
        let (msg1, st) = ot_receive1(&p, &crs, b, &mut rng);
        // u_b = rᵀA + e' and msg1 = u_b − b·v.
        let ub = if b {
            msg1.add(md, crs.v()).unwrap()
        } else {
            msg1.clone()
        };
        let e = ub.sub(md, &crs.a().left_mul(md, &st.r).unwrap()).unwrap();
        assert!(e.norm_inf(md) <= p.receiver_noise().bound() as u64);
    }
}

#[test]
fn honest_pipelines_decode_every_case_on_demo() {
    let p = demo();
    for seed in 0..100 {
        for mode in [Mode::Hiding, Mode::Extractable] {
            assert!(pipeline(&p, mode, seed), "seed {seed} {mode:?}");
        }
    }
}

#[test]
fn honest_pipeline_decodes_on_full() {
    let p = full();
    for mode in [Mode::Hiding, Mode::Extractable] {
        assert!(pipeline(&p, mode, 45));
    }
}

#[test]
fn equal_payloads_hide_the_choice_bit() {
    let p = demo();
    let mut rng = rng_from_seed(46);
    let (crs, _) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    let z = BitVec::from_u64(0b1011, 4);
    for b in [false, true] {
        let (msg1, st) = ot_receive1(&p, &crs, b, &mut rng);
        let msg2 = ot_send(&p, &crs, &msg1, &z, &z, &mut rng).unwrap();
        assert_eq!(ot_receive2(&p, b, &st, &msg2).unwrap(), z);
    }
}

#[test]
fn sending_is_deterministic_under_a_fixed_seed() {
    let p = demo();
    let mut rng = rng_from_seed(47);
    let (crs, _) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    let (msg1, _) = ot_receive1(&p, &crs, true, &mut rng);
    let a = ot_send_bit(&p, &crs, &msg1, false, true, &mut rng_from_seed(1)).unwrap();
    let b = ot_send_bit(&p, &crs, &msg1, false, true, &mut rng_from_seed(1)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 1);
    assert_eq!(a.pairs()[0][0].len(), p.n() + 1);
}

#[test]
fn zero_noise_residues_are_half_q_and_zero() {
    let p = LatticeParams::new("z", (1u64 << 61) - 1, 4, 610, 0.01, 0.01, 0.01)
        .unwrap()
        .with_c(1.0);
    let md = p.modulus();
    let mut rng = rng_from_seed(48);
    let (crs, _) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    for (zb, want) in [(true, *md.half()), (false, 0u64)] {
        let (msg1, st) = ot_receive1(&p, &crs, false, &mut rng);
        let msg2 = ot_send_bit(&p, &crs, &msg1, zb, !zb, &mut rng).unwrap();
        let w = &msg2.pairs()[0][0];
        let head = ModQVector::from_entries(w.entries()[..p.n()].to_vec());
        assert_eq!(md.sub(w.get(p.n()), &st.r.dot(md, &head).unwrap()), want);
        assert_eq!(ot_receive2(&p, false, &st, &msg2).unwrap().get(0), zb);
    }
}

#[test]
fn simulated_send_delivers_the_single_payload() {
    let p = demo();
    let mut rng = rng_from_seed(49);
    let (crs, td) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    for b in [false, true] {
        for zb in [false, true] {
            let (msg1, st) = ot_receive1(&p, &crs, b, &mut rng);
            let zv = BitVec::from_bools(&[zb]);
            let msg2 = ot_simulate_send(&p, &crs, &msg1, &zv, &mut rng).unwrap();
            assert_eq!(ot_receive2(&p, b, &st, &msg2).unwrap(), zv);
            if !zb {
                // With payload 0 both branches decrypt to 0 under their own key.
                let other = ot_sta_rcv(&p, &td, &msg1).unwrap()[usize::from(!b)]
                    .clone()
                    .unwrap();
                assert!(!ot_receive2(&p, !b, &other, &msg2).unwrap().get(0));
            }
        }
    }
}

#[test]
fn state_recovery_returns_the_honest_state() {
    let p = demo();
    let mut rng = rng_from_seed(50);
    let mut both = 0;
    let trials = 100;
    for _ in 0..trials {
        let (crs, td) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
        let b: bool = rand::Rng::gen(&mut rng);
        let (msg1, st) = ot_receive1(&p, &crs, b, &mut rng);
        let rec = ot_sta_rcv(&p, &td, &msg1).unwrap();
        assert_eq!(rec[usize::from(b)].as_ref(), Some(&st));
        both += usize::from(rec.iter().all(Option::is_some));
    }
    assert!(both * 100 >= 99 * trials, "{both}");
}

#[test]
fn state_recovery_rejects_garbage_and_the_wrong_mode() {
    let p = demo();
    let mut rng = rng_from_seed(51);
    let (_, td) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    let mut rejected = 0;
    for _ in 0..50 {
        let garbage = ModQVector::random(p.modulus(), p.m(), &mut rng);
        rejected += usize::from(ot_sta_rcv(&p, &td, &garbage).unwrap() == [None, None]);
    }
    assert!(rejected >= 49, "{rejected}");
    let (crs, xtd) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
    let (msg1, _) = ot_receive1(&p, &crs, false, &mut rng);
    assert!(matches!(
        ot_sta_rcv(&p, &xtd, &msg1),
        Err(Error::InvalidParams(_))
    ));
    assert!(ot_sta_rcv(&p, &td, &ModQVector::zeros(3)).is_err());
}

#[test]
fn extraction_is_unsupported_on_demo() {
    let p = demo();
    let mut rng = rng_from_seed(52);
    let (crs, td) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
    let (msg1, _) = ot_receive1(&p, &crs, false, &mut rng);
    assert!(matches!(
        ot_extract(&p, &td, &msg1),
        Err(Error::Unsupported(_))
    ));
    let (_, htd) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    assert!(matches!(
        ot_extract(&p, &htd, &msg1),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn extraction_recovers_the_honest_choice_on_full() {
    let p = full();
    let mut rng = rng_from_seed(53);
    let (crs, td) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
    let trials = 40;
    let mut hits = 0;
    for t in 0..trials {
        let b = t % 2 == 1;
        let (msg1, _) = ot_receive1(&p, &crs, b, &mut rng);
        hits += usize::from(ot_extract(&p, &td, &msg1).unwrap() == Some(b));
    }
    // A rate of at least 0.99 over 40 trials leaves no room for a miss.
    assert_eq!(hits, trials);
    for _ in 0..10 {
        let garbage = ModQVector::random(p.modulus(), p.m(), &mut rng);
        // Uniform messages are messy on both branches, never decodable on both.
        assert_eq!(ot_extract(&p, &td, &garbage).unwrap(), None);
    }
}

#[test]
fn coherent_receive_keeps_both_branches_in_hiding_mode() {
    let p = demo();
    let mut rng = rng_from_seed(54);
    let (crs, td) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
    for _ in 0..20 {
        let out = ot_coherent_receive1(&p, &crs, &plus_state(), &td, &mut rng).unwrap();
        assert!(!out.collapsed);
        assert_eq!(out.state.branch_count(), 2);
        for br in out.state.branches() {
            let b = br.registers.get("b").unwrap().get(0);
            let st = OtReceiverState::from_bits(&p, br.registers.get("st").unwrap()).unwrap();
            // Each branch holds the state that the recovery algorithm assigns to its bit.
            assert_eq!(
                ot_sta_rcv(&p, &td, &out.msg1).unwrap()[usize::from(b)].as_ref(),
                Some(&st)
            );
        }
        assert!((out.state.norm_sq() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn coherent_receive_collapses_in_extraction_mode() {
    let p = demo();
    let mut rng = rng_from_seed(55);
    let trials = 100;
    let mut collapsed = 0;
    for _ in 0..trials {
        let (crs, td) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
        let out = ot_coherent_receive1(&p, &crs, &plus_state(), &td, &mut rng).unwrap();
        if out.collapsed {
            assert_eq!(out.state.branch_count(), 1);
            collapsed += 1;
        }
    }
    assert!(collapsed * 100 >= 99 * trials, "{collapsed}");
}

#[test]
fn coherent_receive_rejects_states_without_a_choice_register() {
    let p = demo();
    let (crs, td) = ot_crs_gen(&p, Mode::Hiding, &mut rng_from_seed(56));
    let s = BranchState::classical(Registers::single("x", BitVec::from_bools(&[true])));
    assert!(ot_coherent_receive1(&p, &crs, &s, &td, &mut rng_from_seed(57)).is_err());
    let wide = BranchState::classical(Registers::single("b", BitVec::zeros(2)));
    assert!(ot_coherent_receive1(&p, &crs, &wide, &td, &mut rng_from_seed(57)).is_err());
}

#[test]
fn messages_round_trip_and_reject_bad_tags() {
    let p = demo();
    let mut rng = rng_from_seed(58);
    let (crs, _) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
    let (msg1, st) = ot_receive1(&p, &crs, true, &mut rng);
    let msg2 = ot_send(
        &p,
        &crs,
        &msg1,
        &BitVec::from_u64(9, 5),
        &BitVec::from_u64(3, 5),
        &mut rng,
    )
    .unwrap();
    let mut w = Writer::new();
    encode_msg1(&p, &msg1, &mut w);
    msg2.encode(&p, &mut w);
    let bytes = w.into_bytes();
    let mut r = Reader::new(&bytes);
    assert_eq!(decode_msg1(&p, &mut r).unwrap(), msg1);
    assert_eq!(OtMsg2::decode(&p, &mut r).unwrap(), msg2);
    r.finish().unwrap();
    let msg1_len = {
        let mut w = Writer::new();
        encode_msg1(&p, &msg1, &mut w);
        w.into_bytes().len()
    };
    let mut bad = bytes[msg1_len..].to_vec();
    bad[0] ^= 0xff;
    assert!(OtMsg2::decode(&p, &mut Reader::new(&bad)).is_err());
    assert_eq!(st.to_bits(&p).len(), state_bits(&p));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unique_state_holds_for_every_seed(seed: u64, b: bool) {
        let p = demo();
        let mut rng = rng_from_seed(seed);
        let (crs, td) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
        let (msg1, st) = ot_receive1(&p, &crs, b, &mut rng);
        let rec = ot_sta_rcv(&p, &td, &msg1).unwrap();
        prop_assert_eq!(rec[usize::from(b)].as_ref(), Some(&st));
    }

    #[test]
    fn receiver_state_bits_round_trip(seed: u64) {
        let p = demo();
        let mut rng = rng_from_seed(seed);
        let (crs, _) = ot_crs_gen(&p, Mode::Hiding, &mut rng);
        let (_, st) = ot_receive1(&p, &crs, false, &mut rng);
        prop_assert_eq!(OtReceiverState::from_bits(&p, &st.to_bits(&p)).unwrap(), st);
    }

    #[test]
    fn string_payloads_arrive_intact(seed: u64, len in 0usize..24, b: bool) {
        let p = demo();
        let mut rng = rng_from_seed(seed);
        let (crs, _) = ot_crs_gen(&p, Mode::Extractable, &mut rng);
        let z0 = BitVec::random(len, &mut rng);
        let z1 = BitVec::random(len, &mut rng);
        let (msg1, st) = ot_receive1(&p, &crs, b, &mut rng);
        let msg2 = ot_send(&p, &crs, &msg1, &z0, &z1, &mut rng).unwrap();
        prop_assert_eq!(ot_receive2(&p, b, &st, &msg2).unwrap(), if b { z1 } else { z0 });
    }
}
