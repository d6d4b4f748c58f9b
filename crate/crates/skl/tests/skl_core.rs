use proptest::prelude::*;
use skl::garble::{circuit_eval, CircuitBuilder, Wire};
use skl::lease::{
    lessor_circuit, payload_key, skl_del, skl_del_half, skl_del_vrfy, skl_lessee_finish,
    skl_lessee_round1, skl_lessee_unfinish, skl_lessor_round2, skl_setup, DeletionCert, KeygenMsg1,
    MarkScheme, QuantumKey, SklConfig, SklDvk, REG_PAYLOAD, REG_ST, REG_X,
};
use skl::modq::{demo, LatticeParams};
use skl::ntcf::{ntcf_invert, NtcfMode, Preimage};
use skl::ot::{state_bits, Mode};
use skl::sfe::sfe_sta_rcv;
use skl::{gf2_inner, rng_from_seed, BitVec, DemoScalar, SklRng};

type P = LatticeParams<DemoScalar>;

/// Marks `x` as `x ‖ ¬x`, so the payload is easy to predict and not the identity.
struct PairMark(usize);

impl MarkScheme for PairMark {
    fn mark_len(&self) -> usize {
        self.0
    }
    fn key_bits(&self) -> usize {
        2 * self.0
    }
    fn build_mark(&self, b: &mut CircuitBuilder, x: &[Wire]) -> skl::Result<Vec<Wire>> {
        let mut out = x.to_vec();
        out.extend(x.iter().map(|&w| b.not(w)));
        Ok(out)
    }
}

fn pair_mark(x: &BitVec) -> BitVec {
    let mut neg = x.clone();
    (0..x.len()).for_each(|i| neg.flip(i));
    x.concat(&neg)
}

fn config(n: usize, w: usize) -> SklConfig {
    SklConfig::new(n, w).unwrap().with_label_bytes(8).unwrap()
}

struct Session {
    dvk: SklDvk<DemoScalar>,
    msg1: KeygenMsg1<DemoScalar>,
    key: QuantumKey<DemoScalar>,
}

fn session(p: &P, c: SklConfig, rng: &mut SklRng) -> Session {
    let (public, mut dvk, god) = skl_setup(p, c, rng).unwrap();
    let (msg1, state) = skl_lessee_round1(p, &public, &god, rng).unwrap();
    let markers: Vec<PairMark> = (0..c.indices()).map(|_| PairMark(c.w)).collect();
    let msg2 = skl_lessor_round2(p, &public, &markers, &msg1, &mut dvk, rng).unwrap();
    let key = skl_lessee_finish(p, state, msg2).unwrap();
    Session { dvk, msg1, key }
}

fn reg<'a>(s: &'a skl::branch::BranchState, b: usize, name: &str) -> &'a BitVec {
    s.branches()[b].registers.require(name).unwrap()
}

#[test]
fn setup_matches_modes_to_the_subset() {
    let p = demo();
    let mut rng = rng_from_seed(201);
    for n in [1usize, 2, 3] {
        let (public, dvk, god) = skl_setup(&p, config(n, 4), &mut rng).unwrap();
        assert_eq!(public.instances.len(), 2 * n);
        assert_eq!(dvk.subset().len(), n);
        for i in 0..2 * n {
            let inside = dvk.in_subset[i];
            let (fmode, smode) = if inside {
                (NtcfMode::Injective, Mode::Extractable)
            } else {
                (NtcfMode::TwoToOne, Mode::Hiding)
            };
            assert_eq!(god.ntcf_tds[i].mode(), fmode);
            assert_eq!(god.sfe_tds[i].mode(), smode);
            assert_eq!(god.ntcf_tds[i].pp(), &public.instances[i].pp);
            assert_eq!(public.instances[i].crs.width(), 4);
            assert_eq!(dvk.ntcf_tds[i].is_some(), !inside);
            assert_eq!(dvk.sfe_tds[i].is_some(), !inside);
            assert!(dvk.transcript[i].is_none());
        }
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                assert_ne!(public.instances[i].pp, public.instances[j].pp);
            }
        }
    }
    assert!(SklConfig::new(0, 4).is_err());
    assert!(SklConfig::new(2, 3).is_err());
    assert!(SklConfig::new(2, 4).unwrap().with_label_bytes(4).is_err());
}

#[test]
fn round_one_builds_claw_states_and_well_formed_messages() {
    let p = demo();
    let mut rng = rng_from_seed(202);
    let (mut outside, mut survived) = (0, 0);
    for _ in 0..5 {
        let c = config(3, 4);
        let (public, dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
        let (msg1, state) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
        assert_eq!(msg1.ys, state.ys);
        for i in 0..c.indices() {
            assert_eq!(msg1.ys[i].len(), c.w);
            assert_eq!(msg1.msg1s[i].msgs.len(), c.w);
            assert!(msg1.msg1s[i].msgs.iter().all(|v| v.len() == p.m()));
            let s = &state.states[i];
            assert_eq!(s.register_names(), [REG_X, REG_ST]);
            assert_eq!(reg(s, 0, REG_ST).len(), c.w * state_bits(&p));
            if dvk.in_subset[i] {
                assert_eq!(s.branch_count(), 1);
                assert!(!state.collapsed[i]);
            } else {
                outside += 1;
                assert_eq!(s.branch_count(), if state.collapsed[i] { 1 } else { 2 });
                survived += usize::from(!state.collapsed[i]);
            }
            for b in 0..s.branch_count() {
                assert_eq!(
                    public.instances[i].pp.eval(reg(s, b, REG_X)).unwrap(),
                    msg1.ys[i]
                );
            }
        }
        assert_eq!(
            KeygenMsg1::from_items(&p, &msg1.to_items(&p)).unwrap(),
            msg1
        );
    }
    assert!(
        survived as f64 >= 0.9 * outside as f64,
        "{survived}/{outside}"
    );
}

#[test]
fn honest_payload_is_the_mark_of_each_branch() {
    let p = demo();
    let mut rng = rng_from_seed(203);
    let c = config(2, 4);
    let s = session(&p, c, &mut rng);
    for (i, state) in s.key.states.iter().enumerate() {
        assert_eq!(state.register_names(), [REG_X, REG_ST, REG_PAYLOAD]);
        for b in 0..state.branch_count() {
            let x = reg(state, b, REG_X);
            assert_eq!(
                payload_key(reg(state, b, REG_PAYLOAD)).unwrap(),
                pair_mark(x),
                "index {i}"
            );
        }
        let entry = s.dvk.transcript[i].as_ref().unwrap();
        assert_eq!(entry.y, s.msg1.ys[i]);
        assert_eq!(entry.msg1, s.msg1.msg1s[i]);
    }
}

#[test]
fn lessor_circuit_gates_the_mark_on_the_image_check() {
    let mut rng = rng_from_seed(204);
    let (pp, _) = skl::ntcf::ntcf_func_gen(4, NtcfMode::TwoToOne, &mut rng).unwrap();
    let y = pp.eval(&BitVec::from_u64(5, 4)).unwrap();
    let circuit = lessor_circuit(&pp, &y, &PairMark(4)).unwrap();
    for x in 0..16 {
        let x = BitVec::from_u64(x, 4);
        let out = circuit_eval(&circuit, &x).unwrap();
        assert_eq!(out.len(), 9);
        if pp.eval(&x).unwrap() == y {
            assert_eq!(payload_key(&out).unwrap(), pair_mark(&x));
        } else {
            assert!(out.is_zero());
            assert!(payload_key(&out).is_err());
        }
    }
    assert!(lessor_circuit(&pp, &y, &PairMark(6)).is_err());
    assert!(lessor_circuit(&pp, &BitVec::zeros(3), &PairMark(4)).is_err());
}

#[test]
fn tampered_image_yields_invalid_payloads() {
    let p = demo();
    let mut rng = rng_from_seed(205);
    let c = config(2, 4);
    let (public, mut dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
    let (mut msg1, state) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
    let target = (0..c.indices()).find(|&i| !dvk.in_subset[i]).unwrap();
    msg1.ys[target].flip(0);
    let markers: Vec<PairMark> = (0..c.indices()).map(|_| PairMark(c.w)).collect();
    let msg2 = skl_lessor_round2(&p, &public, &markers, &msg1, &mut dvk, &mut rng).unwrap();
    let key = skl_lessee_finish(&p, state, msg2).unwrap();
    for (i, s) in key.states.iter().enumerate() {
        for b in 0..s.branch_count() {
            let payload = reg(s, b, REG_PAYLOAD);
            if i == target {
                assert!(payload.is_zero());
            } else {
                assert_eq!(payload_key(payload).unwrap(), pair_mark(reg(s, b, REG_X)));
            }
        }
    }
}

#[test]
fn round_two_is_deterministic_and_validates_inputs() {
    let p = demo();
    let c = config(1, 4);
    let run = |seed| {
        let mut rng = rng_from_seed(seed);
        let (public, mut dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
        let (msg1, _) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
        let markers: Vec<PairMark> = (0..2).map(|_| PairMark(4)).collect();
        skl_lessor_round2(&p, &public, &markers, &msg1, &mut dvk, &mut rng).unwrap()
    };
    assert_eq!(run(206), run(206));
    assert_ne!(run(206), run(207));

    let mut rng = rng_from_seed(208);
    let (public, mut dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
    let (msg1, _) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
    let one: Vec<PairMark> = vec![PairMark(4)];
    assert!(skl_lessor_round2(&p, &public, &one, &msg1, &mut dvk, &mut rng).is_err());
    let wide: Vec<PairMark> = (0..2).map(|_| PairMark(6)).collect();
    assert!(skl_lessor_round2(&p, &public, &wide, &msg1, &mut dvk, &mut rng).is_err());
    let markers: Vec<PairMark> = (0..2).map(|_| PairMark(4)).collect();
    let mut short = msg1.clone();
    short.ys.pop();
    assert!(matches!(
        skl_lessor_round2(&p, &public, &markers, &short, &mut dvk, &mut rng),
        Err(skl::Error::Protocol(_))
    ));
    let mut bad = msg1.clone();
    bad.msg1s[0].msgs.pop();
    assert!(skl_lessor_round2(&p, &public, &markers, &bad, &mut dvk, &mut rng).is_err());
    assert!(dvk.transcript.iter().all(Option::is_none));
}

#[test]
fn unfinish_restores_the_round_one_state() {
    let p = demo();
    let mut rng = rng_from_seed(209);
    let c = config(2, 4);
    let (public, mut dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
    let (msg1, state) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
    let markers: Vec<PairMark> = (0..c.indices()).map(|_| PairMark(c.w)).collect();
    let msg2 = skl_lessor_round2(&p, &public, &markers, &msg1, &mut dvk, &mut rng).unwrap();
    let before = state.states.clone();
    let key = skl_lessee_finish(&p, state, msg2).unwrap();
    assert_eq!(skl_lessee_unfinish(&p, &key).unwrap(), before);
    for (i, s) in key.states.iter().enumerate() {
        if dvk.in_subset[i] {
            assert_eq!(s.branch_count(), 1);
        }
    }
}

#[test]
fn deletion_certificates_satisfy_the_coset_condition() {
    let p = demo();
    let mut rng = rng_from_seed(210);
    let c = config(2, 4);
    let s = session(&p, c, &mut rng);
    let u = state_bits(&p);
    let pre = skl_lessee_unfinish(&p, &s.key).unwrap();
    for _ in 0..20 {
        let cert = skl_del(&p, s.key.clone(), &mut rng).unwrap();
        assert_eq!(cert.entries.len(), c.indices());
        for ((d, cv), state) in cert.entries.iter().zip(&pre) {
            assert_eq!((d.len(), cv.len()), (c.w, u * c.w));
            if state.branch_count() == 2 {
                let diff = state.branches()[0]
                    .registers
                    .concat()
                    .xor(&state.branches()[1].registers.concat())
                    .unwrap();
                assert!(!gf2_inner(&d.concat(cv), &diff).unwrap());
            }
        }
    }
}

#[test]
fn honest_deletion_verifies_at_width_sixteen() {
    let p = demo();
    let mut rng = rng_from_seed(211);
    for _ in 0..5 {
        let c = config(2, 16);
        let s = session(&p, c, &mut rng);
        let cert = skl_del(&p, s.key, &mut rng).unwrap();
        let verdict = skl_del_vrfy(&p, &s.dvk, c.w, &cert);
        assert!(verdict.accepted, "{verdict:?}");
        assert!(verdict.diagnostics.is_empty());
    }
}

#[test]
fn half_key_deletion_verifies_too() {
    let p = demo();
    let mut rng = rng_from_seed(212);
    let c = config(2, 16);
    let (public, mut dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
    let (msg1, state) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
    dvk.record(&msg1).unwrap();
    let cert = skl_del_half(state, &mut rng).unwrap();
    assert!(skl_del_vrfy(&p, &dvk, c.w, &cert).accepted);
}

#[test]
fn random_certificates_pass_each_index_about_half_the_time() {
    let p = demo();
    let mut rng = rng_from_seed(213);
    let c = config(2, 8);
    let (public, mut dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
    let (msg1, _) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
    dvk.record(&msg1).unwrap();
    let verifier = skl::lease::DelVerifier::new(&p, &dvk, c.w);
    let trials = 4000;
    let accepted = (0..trials)
        .filter(|_| {
            verifier
                .verify(&DeletionCert::random(&p, &c, &mut rng))
                .accepted
        })
        .count();
    let rate = accepted as f64 / trials as f64;
    // Two checked indices, each passing with probability (1 - 2^-8) / 2.
    assert!((rate - 0.25).abs() < 0.03, "{rate}");
}

#[test]
fn flipping_a_claw_direction_into_d_rejects() {
    let p = demo();
    let mut rng = rng_from_seed(214);
    let mut odd_seen = 0;
    for _ in 0..6 {
        let c = config(2, 16);
        let s = session(&p, c, &mut rng);
        let cert = skl_del(&p, s.key, &mut rng).unwrap();
        assert!(skl_del_vrfy(&p, &s.dvk, c.w, &cert).accepted);
        for i in (0..c.indices()).filter(|&i| !s.dvk.in_subset[i]) {
            let td = s.dvk.ntcf_tds[i].as_ref().unwrap();
            let Some(Preimage::Claw(x0, x1)) = ntcf_invert(td, &s.msg1.ys[i]) else {
                panic!("index {i} has no claw")
            };
            let delta = x0.xor(&x1).unwrap();
            // Any v with ⟨v, δ⟩ = 1 flips the parity; δ itself does when its weight is odd.
            let v = if delta.weight() % 2 == 1 {
                odd_seen += 1;
                delta.clone()
            } else {
                loop {
                    let v = BitVec::random(c.w, &mut rng);
                    if gf2_inner(&v, &delta).unwrap() {
                        break v;
                    }
                }
            };
            let mut forged = cert.clone();
            forged.entries[i].0 = forged.entries[i].0.xor(&v).unwrap();
            let verdict = skl_del_vrfy(&p, &s.dvk, c.w, &forged);
            assert!(!verdict.accepted);
            assert!(verdict
                .diagnostics
                .iter()
                .any(|d| d.contains(&format!("index {i}"))));
        }
        // Entries for indices inside S are never inspected.
        for i in (0..c.indices()).filter(|&i| s.dvk.in_subset[i]) {
            let mut other = cert.clone();
            other.entries[i].0 = BitVec::random(c.w, &mut rng);
            assert!(skl_del_vrfy(&p, &s.dvk, c.w, &other).accepted);
        }
    }
    assert!(odd_seen > 0);
}

#[test]
fn malformed_certificates_and_keys_are_rejected() {
    let p = demo();
    let mut rng = rng_from_seed(215);
    let c = config(2, 16);
    let s = session(&p, c, &mut rng);
    let cert = skl_del(&p, s.key.clone(), &mut rng).unwrap();

    let mut short = cert.clone();
    short.entries.pop();
    let v = skl_del_vrfy(&p, &s.dvk, c.w, &short);
    assert!(!v.accepted && v.diagnostics[0].contains("entries"));

    let i = (0..c.indices()).find(|&i| !s.dvk.in_subset[i]).unwrap();
    let mut narrow = cert.clone();
    narrow.entries[i].1 = BitVec::zeros(3);
    let v = skl_del_vrfy(&p, &s.dvk, c.w, &narrow);
    assert!(!v.accepted && v.diagnostics[0].contains("lengths"));

    let mut unrecorded = s.dvk.clone();
    unrecorded.transcript = vec![None; c.indices()];
    assert!(!skl_del_vrfy(&p, &unrecorded, c.w, &cert).accepted);

    assert_eq!(DeletionCert::from_items(&cert.to_items()).unwrap(), cert);
    let mut items = cert.to_items();
    items[0].push(0);
    assert!(DeletionCert::from_items(&items).is_err());

    // A key without its payload register cannot be deleted as a full key.
    let stripped = QuantumKey {
        states: skl_lessee_unfinish(&p, &s.key).unwrap(),
        msg2s: s.key.msg2s.clone(),
    };
    assert!(skl_del(&p, stripped, &mut rng).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn corrected_parity_identity_holds_on_protocol_states(seed: u64) {
        let p = demo();
        let mut rng = rng_from_seed(seed);
        let c = config(1, 4);
        let (public, dvk, god) = skl_setup(&p, c, &mut rng).unwrap();
        let (msg1, state) = skl_lessee_round1(&p, &public, &god, &mut rng).unwrap();
        for i in (0..2).filter(|&i| !dvk.in_subset[i] && state.states[i].branch_count() == 2) {
            let s = &state.states[i];
            let table = sfe_sta_rcv(&p, dvk.sfe_tds[i].as_ref().unwrap(), &msg1.msg1s[i]).unwrap().unwrap();
            let dx = reg(s, 0, REG_X).xor(reg(s, 1, REG_X)).unwrap();
            let dst = reg(s, 0, REG_ST).xor(reg(s, 1, REG_ST)).unwrap();
            for _ in 0..32 {
                let cv = BitVec::random(dst.len(), &mut rng);
                let d_star = table.correction(&cv).unwrap();
                prop_assert_eq!(gf2_inner(&cv, &dst).unwrap(), gf2_inner(&d_star, &dx).unwrap());
            }
        }
    }
}
