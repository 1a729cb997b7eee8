use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrd::codes::{MooreSpec, RankCode};
use mrd::constructions::builtin_example;
use mrd::criteria::{detect_gabidulin, is_mrd_minor};
use mrd::gf::{FieldSpec, Fqm};
use mrd::isometry::{random_isometry, rank_distribution};
use mrd::linalg::Matrix;

fn f34() -> Arc<FieldSpec> {
    Arc::new(FieldSpec::new(3, 4, &[2, 0, 0, 2, 1]).unwrap())
}

fn corpus() -> Vec<RankCode> {
    let f = f34();
    let mut out = Vec::new();
    for (k, s) in [(1, 1), (2, 1), (2, 3), (3, 3)] {
        let g = (0..4).map(|i| f.alpha_pow(i)).collect();
        out.push(RankCode::gabidulin(f.clone(), &MooreSpec { g, k, s }).unwrap());
    }
    out.push(builtin_example("q3-m4-len4").unwrap().unwrap().code);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    while out.len() < 10 {
        let data = (0..8).map(|_| Fqm(rng.gen_range(0..81))).collect();
        if let Ok(c) = RankCode::new(f.clone(), Matrix::new(2, 4, data).unwrap()) {
            out.push(c);
        }
    }
    out
}

#[test]
fn gabidulin_class_is_closed_under_isometries() {
    let f = f34();
    let g = (0..4).map(|i| f.alpha_pow(i)).collect();
    let code = RankCode::gabidulin(f.clone(), &MooreSpec { g, k: 2, s: 1 }).unwrap();
    for seed in 0..200 {
        let img = random_isometry(&f, 4, seed).apply(&code).unwrap();
        assert!(detect_gabidulin(&img, false).unwrap().is_generalized_gabidulin, "seed {seed}");
    }
}

#[test]
fn verdicts_and_distance_are_invariant_on_corpus() {
    for (ci, code) in corpus().iter().enumerate() {
        let mrd = is_mrd_minor(code).unwrap().is_mrd;
        let gab = mrd.then(|| detect_gabidulin(code, true).unwrap().is_generalized_gabidulin);
        let d = code.min_rank_distance().unwrap();
        let dist = rank_distribution(code).unwrap();
        for seed in 0..50 {
            let img = random_isometry(code.field(), code.n(), 100 * ci as u64 + seed).apply(code).unwrap();
            assert_eq!(is_mrd_minor(&img).unwrap().is_mrd, mrd);
            if mrd {
                assert_eq!(Some(detect_gabidulin(&img, true).unwrap().is_generalized_gabidulin), gab);
            }
            assert_eq!(img.min_rank_distance().unwrap(), d);
            assert_eq!(rank_distribution(&img).unwrap(), dist);
        }
    }
}
