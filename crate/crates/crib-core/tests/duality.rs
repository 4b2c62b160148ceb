mod common;

use common::{matched_sr_joint, random_mac};
use crib_core::mac::{duality_check, duality_check_conferencing, mac_corner_points, mac_region, MacInstance};
use crib_core::region::{BernoulliFamily, CribbingMode, Rate};
use crib_core::prob::CribFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_matched_pairs_all_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for mode in CribbingMode::ALL {
        for t in 0..50 {
            let m = random_mac(&mut rng, mode);
            let p = matched_sr_joint(&m);
            let rep = duality_check(&p, &m, mode).unwrap();
            assert!(rep.passed, "{mode} #{t}: {rep:?}");
        }
    }
}

#[test]
fn conferencing_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let m = random_mac(&mut rng, CribbingMode::NonCausal);
        let p = matched_sr_joint(&m);
        let r12 = Rate::Finite(rng.random_range(0.0..1.0));
        assert!(duality_check_conferencing(&p, &m, r12).unwrap().passed);
        assert!(duality_check_conferencing(&p, &m, Rate::Infinite).unwrap().passed);
    }
}

#[test]
fn corners_satisfy_region_and_causal_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for mode in CribbingMode::ALL {
        for _ in 0..30 {
            let m = random_mac(&mut rng, mode);
            let r = mac_region(&m, mode).unwrap();
            if let Some(gap) = r.identity_gap {
                assert!(gap < 1e-9);
            }
            for c in mac_corner_points(&m, mode).unwrap() {
                assert!(r.contains(c.r0, c.r1), "{mode}: {c:?} vs {r:?}");
            }
        }
    }
}

#[test]
fn bernoulli_optimum_derived_instance() {
    let fam = BernoulliFamily::new(0.05, 0.1).unwrap();
    let p = fam.joint(0.95 * 0.9).unwrap();
    for mode in [CribbingMode::NonCausal, CribbingMode::StrictlyCausal] {
        let m = MacInstance::from_sr_joint(&p, CribFunction::identity(2), mode).unwrap();
        let rep = duality_check(&p, &m, mode).unwrap();
        assert!(rep.passed && rep.max_diff < 1e-9);
    }
    let m = MacInstance::from_sr_joint(&p, CribFunction::constant(2), CribbingMode::NonCausal).unwrap();
    let rep = duality_check(&p, &m, CribbingMode::NonCausal).unwrap();
    assert!(rep.passed);
}
