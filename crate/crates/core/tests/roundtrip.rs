use bipoly::error::Error;
use bipoly::field::MERSENNE_31;
use bipoly::matrix::mat_mul;
use bipoly::scheme::{
    decode, encode, encode_with, partition, sample_points, sample_prefix_subset, worker_compute,
    Masks, ResponseSet, WorkerShare,
};
use bipoly::{FieldMatrix, SchemeParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_results(shares: &[WorkerShare], p: &SchemeParams) -> ResponseSet {
    ResponseSet::new(
        shares
            .iter()
            .flat_map(|s| (0..p.m).map(move |o| worker_compute(s, o, p.q).unwrap()))
            .collect(),
    )
}

fn shape_strategy() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (1usize..=4, 1usize..=4, 0usize..=2)
        .prop_flat_map(|(k, l, t)| (Just(k), Just(l), Just(t), 1..=l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_recovers_product((k, l, t, m) in shape_strategy(), seed in any::<u64>(), extra in 0usize..4) {
        let rth = bipoly::CodeShape::new(k, l, t, m).unwrap().recovery_threshold();
        let p = SchemeParams::new(k, l, t, m, rth.div_ceil(m) + extra, MERSENNE_31).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FieldMatrix::random(2 * k, 3, p.q, &mut rng);
        let b = FieldMatrix::random(3, 2 * l, p.q, &mut rng);
        let enc = encode(&a, &b, &p, &mut rng).unwrap();
        let subset = sample_prefix_subset(&all_results(&enc.shares, &p), rth, &mut rng).unwrap();
        let got = decode(&subset, &p).unwrap();
        prop_assert_eq!(got.assembled, mat_mul(&a, &b, p.q).unwrap());
    }
}

#[test]
fn any_subset_gives_the_same_answer() {
    let p = SchemeParams::new(3, 2, 2, 2, 20, MERSENNE_31).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = FieldMatrix::random(6, 4, p.q, &mut rng);
    let b = FieldMatrix::random(4, 4, p.q, &mut rng);
    let enc = encode(&a, &b, &p, &mut rng).unwrap();
    let all = all_results(&enc.shares, &p);
    let first = decode(
        &sample_prefix_subset(&all, p.recovery_threshold(), &mut rng).unwrap(),
        &p,
    )
    .unwrap();
    for _ in 0..20 {
        let sub = sample_prefix_subset(&all, p.recovery_threshold(), &mut rng).unwrap();
        assert_eq!(decode(&sub, &p).unwrap(), first);
    }
    // extra responses beyond R_th are ignored, not harmful
    assert_eq!(decode(&all, &p).unwrap(), first);
}

#[test]
fn one_short_is_refused() {
    let p = SchemeParams::new(2, 2, 1, 2, 8, MERSENNE_31).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = FieldMatrix::random(2, 2, p.q, &mut rng);
    let b = FieldMatrix::random(2, 2, p.q, &mut rng);
    let enc = encode(&a, &b, &p, &mut rng).unwrap();
    let need = p.recovery_threshold();
    let sub = sample_prefix_subset(&all_results(&enc.shares, &p), need - 1, &mut rng).unwrap();
    assert!(matches!(
        decode(&sub, &p),
        Err(Error::NotEnoughResponses { got, need: n }) if got == need - 1 && n == need
    ));
}

#[test]
fn masks_do_not_touch_the_blocks() {
    let p = SchemeParams::new(2, 3, 2, 2, 20, MERSENNE_31).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = FieldMatrix::random(4, 5, p.q, &mut rng);
    let b = FieldMatrix::random(5, 6, p.q, &mut rng);
    let (a_parts, b_parts) = partition(&a, &b, &p).unwrap();
    let points = sample_points(&p, &mut rng).unwrap();
    let masked = encode_with(
        &a_parts,
        &b_parts,
        &Masks::random(&p, (2, 5), (5, 2), &mut rng),
        &points,
        &p,
    )
    .unwrap();
    let plain = encode_with(
        &a_parts,
        &b_parts,
        &Masks::zero(&p, (2, 5), (5, 2)),
        &points,
        &p,
    )
    .unwrap();
    assert_ne!(masked, plain);
    let sub = |shares: &[bipoly::scheme::WorkerShare]| {
        let all = all_results(shares, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        sample_prefix_subset(&all, p.recovery_threshold(), &mut rng).unwrap()
    };
    let x = decode(&sub(&masked), &p).unwrap();
    let y = decode(&sub(&plain), &p).unwrap();
    assert_eq!(x.blocks, y.blocks);
    assert_eq!(x.assembled, mat_mul(&a, &b, p.q).unwrap());
}

#[test]
fn singular_rate_respects_bound() {
    let p = SchemeParams::new(2, 2, 1, 2, 5, 101).unwrap();
    let d = p.shape().failure_bound_d().unwrap() as f64;
    let trials = 10_000;
    let mut singular = 0;
    let a = FieldMatrix::from_rows(&[vec![1, 2], vec![3, 4]], p.q).unwrap();
    let b = FieldMatrix::from_rows(&[vec![5, 6], vec![7, 8]], p.q).unwrap();
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let enc = encode(&a, &b, &p, &mut rng).unwrap();
        match decode(&all_results(&enc.shares, &p), &p) {
            Ok(got) => assert_eq!(got.assembled, mat_mul(&a, &b, p.q).unwrap()),
            Err(Error::DecodeSingular) => singular += 1,
            Err(e) => panic!("{e}"),
        }
    }
    let rate = singular as f64 / trials as f64;
    assert!(rate <= d / 101.0, "rate {rate} above {d}/101");
}
