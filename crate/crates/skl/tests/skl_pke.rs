use skl::lease::{
    gl_decrypt, gl_decrypt_bits, gl_encrypt, gl_encrypt_bits, gl_encrypt_with, gl_qdecrypt, ni_del,
    ni_del_vrfy, ni_enc, ni_kg, ni_qdec, ni_setup, payload_key, pke_skl_dec, pke_skl_enc,
    pke_skl_lessor_round2, pke_skl_message_len, pke_skl_qdec, pke_skl_setup, skl_del, skl_del_vrfy,
    skl_lessee_finish, skl_lessee_round1, PkeSklEk, PkeSklMsk, QuantumKey, SklConfig, SklDvk,
    REG_PAYLOAD, REG_X,
};
use skl::modq::{demo, LatticeParams};
use skl::pke::{regev_small, Pke, ToyPke};
use skl::wpke::wpke_mark;
use skl::{rng_from_seed, BitVec, DemoScalar, SklRng};

type P = LatticeParams<DemoScalar>;

fn config(n: usize, w: usize) -> SklConfig {
    SklConfig::new(n, w).unwrap().with_label_bytes(8).unwrap()
}

struct Keys<K: Pke> {
    ek: PkeSklEk<DemoScalar, K>,
    msk: PkeSklMsk<K>,
    dvk: SklDvk<DemoScalar>,
    qdk: QuantumKey<DemoScalar>,
}

fn keygen<K: Pke>(p: &P, pke: &K, c: SklConfig, rng: &mut SklRng) -> Keys<K> {
    let (ek, msk, mut dvk, god) = pke_skl_setup(p, pke, c, rng).unwrap();
    let (msg1, state) = skl_lessee_round1(p, &ek.public, &god, rng).unwrap();
    let msg2 = pke_skl_lessor_round2(p, pke, &ek, &msk, &msg1, &mut dvk, rng).unwrap();
    let qdk = skl_lessee_finish(p, state, msg2).unwrap();
    Keys { ek, msk, dvk, qdk }
}

/// Same registers, amplitudes within `tol`.
fn close(a: &QuantumKey<DemoScalar>, b: &QuantumKey<DemoScalar>, tol: f64) -> bool {
    a.states.iter().zip(&b.states).all(|(s, t)| {
        s.branch_count() == t.branch_count()
            && s.branches()
                .iter()
                .zip(t.branches())
                .all(|(x, y)| x.registers == y.registers && (x.amplitude - y.amplitude).abs() < tol)
    })
}

#[test]
fn setup_issues_one_watermarkable_key_per_index() {
    let p = demo();
    let mut rng = rng_from_seed(301);
    let c = config(3, 4);
    let (ek, msk, dvk, _) = pke_skl_setup(&p, &ToyPke, c, &mut rng).unwrap();
    assert_eq!(ek.weks.len(), 6);
    assert_eq!(msk.msks.len(), 6);
    assert!(ek.weks.iter().all(|k| k.ell() == 4));
    assert!(msk.msks.iter().all(|k| k.ell() == 4));
    assert_eq!(ek.public.instances.len(), 6);
    assert_eq!(dvk.subset().len(), 3);
    assert_eq!(pke_skl_message_len(&c), 24);
}

#[test]
fn payload_is_the_marked_key_of_each_branch() {
    let p = demo();
    let mut rng = rng_from_seed(302);
    let keys = keygen(&p, &ToyPke, config(2, 4), &mut rng);
    for (state, msk) in keys.qdk.states.iter().zip(&keys.msk.msks) {
        for b in state.branches() {
            let x = b.registers.require(REG_X).unwrap();
            let marked = wpke_mark(msk, x).unwrap().to_bits(&ToyPke);
            assert_eq!(
                payload_key(b.registers.require(REG_PAYLOAD).unwrap()).unwrap(),
                marked
            );
        }
    }
}

#[test]
fn regev_instantiation_runs_end_to_end() {
    let p = demo();
    let pke = regev_small();
    let mut rng = rng_from_seed(303);
    let c = config(1, 2);
    let keys = keygen(&p, &pke, c, &mut rng);
    for _ in 0..3 {
        let m = BitVec::random(pke_skl_message_len(&c), &mut rng);
        let ct = pke_skl_enc(&pke, &keys.ek.weks, &m, &mut rng).unwrap();
        assert_eq!(pke_skl_dec(&pke, &keys.msk, &ct).unwrap(), m);
        assert_eq!(pke_skl_qdec(&pke, &keys.qdk, &ct, &mut rng).unwrap().0, m);
    }
}

#[test]
fn lessor_aborts_on_a_malformed_first_message() {
    let p = demo();
    let mut rng = rng_from_seed(304);
    let (ek, msk, mut dvk, god) = pke_skl_setup(&p, &ToyPke, config(2, 4), &mut rng).unwrap();
    let (mut msg1, _) = skl_lessee_round1(&p, &ek.public, &god, &mut rng).unwrap();
    msg1.msg1s.truncate(3);
    assert!(pke_skl_lessor_round2(&p, &ToyPke, &ek, &msk, &msg1, &mut dvk, &mut rng).is_err());
    assert!(dvk.transcript.iter().all(Option::is_none));
}

#[test]
fn master_decryption_inverts_encryption() {
    let p = demo();
    let mut rng = rng_from_seed(305);
    let (ek, msk, _, _) = pke_skl_setup(&p, &ToyPke, config(4, 8), &mut rng).unwrap();
    for _ in 0..1000 {
        let m = BitVec::random(64, &mut rng);
        let ct = pke_skl_enc(&ToyPke, &ek.weks, &m, &mut rng).unwrap();
        assert_eq!(pke_skl_dec(&ToyPke, &msk, &ct).unwrap(), m);
    }
    assert!(pke_skl_enc(&ToyPke, &ek.weks, &BitVec::zeros(63), &mut rng).is_err());
}

#[test]
fn blocks_decrypt_independently() {
    let p = demo();
    let mut rng = rng_from_seed(306);
    let (ek, msk, _, _) = pke_skl_setup(&p, &ToyPke, config(2, 4), &mut rng).unwrap();
    let m = BitVec::random(16, &mut rng);
    let ct = pke_skl_enc(&ToyPke, &ek.weks, &m, &mut rng).unwrap();
    for i in 0..4 {
        let other = BitVec::random(16, &mut rng);
        let mut mixed = ct.clone();
        mixed.cts[i] = pke_skl_enc(&ToyPke, &ek.weks, &other, &mut rng)
            .unwrap()
            .cts[i]
            .clone();
        let got = pke_skl_dec(&ToyPke, &msk, &mixed).unwrap();
        for j in 0..4 {
            let want = if j == i { &other } else { &m };
            assert_eq!(got.slice(4 * j, 4).unwrap(), want.slice(4 * j, 4).unwrap());
        }
    }
}

#[test]
fn coherent_decryption_returns_the_key_unchanged() {
    let p = demo();
    let mut rng = rng_from_seed(307);
    let c = config(2, 16);
    let keys = keygen(&p, &ToyPke, c, &mut rng);
    let mut qdk = keys.qdk.clone();
    for _ in 0..100 {
        let m = BitVec::random(pke_skl_message_len(&c), &mut rng);
        let ct = pke_skl_enc(&ToyPke, &keys.ek.weks, &m, &mut rng).unwrap();
        let (got, next) = pke_skl_qdec(&ToyPke, &qdk, &ct, &mut rng).unwrap();
        assert_eq!(got, m);
        assert!(close(&next, &keys.qdk, 1e-12));
        qdk = next;
    }
    assert!(close(&qdk, &keys.qdk, 1e-9));
    let cert = skl_del(&p, qdk, &mut rng).unwrap();
    assert!(skl_del_vrfy(&p, &keys.dvk, c.w, &cert).accepted);
}

#[test]
fn single_branch_indices_decrypt_classically() {
    let p = demo();
    let mut rng = rng_from_seed(308);
    let keys = keygen(&p, &ToyPke, config(2, 4), &mut rng);
    let m = BitVec::random(16, &mut rng);
    let ct = pke_skl_enc(&ToyPke, &keys.ek.weks, &m, &mut rng).unwrap();
    for i in keys.dvk.subset() {
        let state = &keys.qdk.states[i];
        assert_eq!(state.branch_count(), 1);
        let dk = wpke_mark(
            &keys.msk.msks[i],
            state.branches()[0].registers.require(REG_X).unwrap(),
        )
        .unwrap();
        assert_eq!(
            skl::wpke::wpke_dec(&ToyPke, &dk, &ct.cts[i]).unwrap(),
            m.slice(4 * i, 4).unwrap()
        );
    }
}

#[test]
fn invalid_payload_branches_fail_to_decrypt() {
    let p = demo();
    let mut rng = rng_from_seed(309);
    let c = config(2, 4);
    let (ek, msk, mut dvk, god) = pke_skl_setup(&p, &ToyPke, c, &mut rng).unwrap();
    let (mut msg1, state) = skl_lessee_round1(&p, &ek.public, &god, &mut rng).unwrap();
    msg1.ys[0].flip(1);
    let msg2 = pke_skl_lessor_round2(&p, &ToyPke, &ek, &msk, &msg1, &mut dvk, &mut rng).unwrap();
    let qdk = skl_lessee_finish(&p, state, msg2).unwrap();
    let ct = pke_skl_enc(&ToyPke, &ek.weks, &BitVec::zeros(16), &mut rng).unwrap();
    assert!(pke_skl_qdec(&ToyPke, &qdk, &ct, &mut rng).is_err());
    let mut short = ct.clone();
    short.cts.pop();
    assert!(pke_skl_qdec(&ToyPke, &qdk, &short, &mut rng).is_err());
}

#[test]
fn inner_product_bits_round_trip() {
    let p = demo();
    let mut rng = rng_from_seed(310);
    let keys = keygen(&p, &ToyPke, config(2, 4), &mut rng);
    let weks = &keys.ek.weks;
    for _ in 0..50 {
        for m in [false, true] {
            let ct = gl_encrypt(&ToyPke, weks, m, &mut rng).unwrap();
            assert_eq!(ct.r.len(), 16);
            assert_eq!(gl_decrypt(&ToyPke, &keys.msk, &ct).unwrap(), m);
            let (q, next) = gl_qdecrypt(&ToyPke, &keys.qdk, &ct, &mut rng).unwrap();
            assert_eq!(q, m);
            assert!(close(&next, &keys.qdk, 1e-12));
        }
    }
    for m in [false, true] {
        assert_eq!(
            gl_encrypt_with(&ToyPke, weks, m, &BitVec::zeros(16), &mut rng)
                .unwrap()
                .b,
            m
        );
    }
    let msg = BitVec::random(20, &mut rng);
    let cts = gl_encrypt_bits(&ToyPke, weks, &msg, &mut rng).unwrap();
    assert_eq!(cts.len(), 20);
    assert_eq!(gl_decrypt_bits(&ToyPke, &keys.msk, &cts).unwrap(), msg);
}

#[test]
fn non_interactive_round_trip() {
    let p = demo();
    let mut rng = rng_from_seed(311);
    let c = config(2, 16);
    let (public, dvk, god) = ni_setup(&p, c, &mut rng).unwrap();
    let (ek, half) = ni_kg(&p, &public, &god, &mut rng).unwrap();
    assert_eq!(ek.public, public);
    let before = half.states.clone();
    let mut half = half;
    for _ in 0..3 {
        let m = BitVec::random(pke_skl_message_len(&c), &mut rng);
        let ct = ni_enc(&p, &ToyPke, &ek, &m, &mut rng).unwrap();
        let (got, next) = ni_qdec(&p, &ToyPke, &half, &ct, &mut rng).unwrap();
        assert_eq!(got, m);
        assert_eq!(next.states, before);
        half = next;
    }
    let cert = ni_del(half, &mut rng).unwrap();
    assert!(ni_del_vrfy(&p, &dvk, &ek, &cert).unwrap().accepted);
    // The transcript comes from the published key, not the stored verification key.
    assert!(dvk.transcript.iter().all(Option::is_none));
}

#[test]
fn non_interactive_deletion_before_any_ciphertext() {
    let p = demo();
    let mut rng = rng_from_seed(312);
    for _ in 0..5 {
        let c = config(2, 16);
        let (public, dvk, god) = ni_setup(&p, c, &mut rng).unwrap();
        let (ek, half) = ni_kg(&p, &public, &god, &mut rng).unwrap();
        let cert = ni_del(half, &mut rng).unwrap();
        assert!(ni_del_vrfy(&p, &dvk, &ek, &cert).unwrap().accepted);
    }
}

#[test]
fn independent_ciphertexts_share_one_half_key() {
    let p = demo();
    let mut rng = rng_from_seed(313);
    let c = config(2, 4);
    let (public, _, god) = ni_setup(&p, c, &mut rng).unwrap();
    let (ek, half) = ni_kg(&p, &public, &god, &mut rng).unwrap();
    let (m1, m2) = (BitVec::random(16, &mut rng), BitVec::random(16, &mut rng));
    let ct1 = ni_enc(&p, &ToyPke, &ek, &m1, &mut rng).unwrap();
    let ct2 = ni_enc(&p, &ToyPke, &ek, &m2, &mut rng).unwrap();
    assert_ne!(ct1.weks, ct2.weks);
    assert_eq!(ni_qdec(&p, &ToyPke, &half, &ct2, &mut rng).unwrap().0, m2);
    assert_eq!(ni_qdec(&p, &ToyPke, &half, &ct1, &mut rng).unwrap().0, m1);
    let mut mixed = ct1.clone();
    mixed.ct.cts.pop();
    assert!(ni_qdec(&p, &ToyPke, &half, &mixed, &mut rng).is_err());
}
