use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use mrd::codes::RankCode;
use mrd::gf::{FieldOps, FieldSpec, Fq, Fqm};
use mrd::isometry::random_isometry;
use mrd::linalg::{self, Matrix};

fn f35() -> &'static Arc<FieldSpec> {
    static F: OnceLock<Arc<FieldSpec>> = OnceLock::new();
    F.get_or_init(|| Arc::new(FieldSpec::new(3, 5, &[1, 1, 2, 0, 0, 1]).unwrap()))
}

fn elem() -> impl Strategy<Value = Fqm> {
    (0u32..243).prop_map(Fqm)
}

proptest! {
    #[test]
    fn frobenius_is_a_field_automorphism(a in elem(), b in elem(), s in 0u32..5) {
        let f = f35();
        prop_assert_eq!(f.frobenius(f.add(a, b), s), f.add(f.frobenius(a, s), f.frobenius(b, s)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), s), f.mul(f.frobenius(a, s), f.frobenius(b, s)));
        prop_assert_eq!(f.frobenius(f.frobenius(a, s), 5 - s), a);
    }

    #[test]
    fn expansion_is_linear(a in elem(), b in elem(), c in 0u32..3) {
        let f = f35();
        let lhs = f.expand(f.add(a, f.scale(b, Fq(c))));
        let rhs: Vec<Fq> = f.expand(a).iter().zip(f.expand(b)).map(|(x, y)| Fq((x.0 + c * y.0) % 3)).collect();
        prop_assert_eq!(f.from_coeffs(&lhs).unwrap(), f.add(a, f.scale(b, Fq(c))));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn field_axioms(a in elem(), b in elem(), c in elem()) {
        let f = f35();
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != Fqm::ZERO {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fqm::ONE);
        }
    }

    #[test]
    fn rank_q_is_invariant_under_scaling_and_base_column_ops(
        v in proptest::collection::vec(elem(), 1..6),
        lambda in 1u32..243,
        seed in any::<u64>(),
    ) {
        let f = f35();
        let r = linalg::rank_q(f, &v);
        let scaled: Vec<Fqm> = v.iter().map(|&x| f.mul(Fqm(lambda), x)).collect();
        prop_assert_eq!(linalg::rank_q(f, &scaled), r);
        let a = random_isometry(f, v.len(), seed).a;
        let row = Matrix::new(1, v.len(), v.clone()).unwrap();
        let moved = linalg::mul(f.as_ref(), &row, &linalg::embed_matrix(f, &a)).unwrap();
        prop_assert_eq!(linalg::rank_q(f, moved.row(0)), r);
        prop_assert!(r <= v.len().min(5));
    }

    #[test]
    fn encoding_is_linear(
        rows in proptest::collection::vec(elem(), 8),
        x in proptest::collection::vec(elem(), 2),
        y in proptest::collection::vec(elem(), 2),
        c in elem(),
    ) {
        let f = f35();
        let Ok(code) = RankCode::new(f.clone(), Matrix::new(2, 4, rows).unwrap()) else { return Ok(()) };
        let xy: Vec<Fqm> = x.iter().zip(&y).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect();
        let lhs = code.encode(&xy).unwrap();
        let ex = code.encode(&x).unwrap();
        let ey = code.encode(&y).unwrap();
        let rhs: Vec<Fqm> = ex.iter().zip(&ey).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dual_is_orthogonal_and_involutive(rows in proptest::collection::vec(elem(), 8)) {
        let f = f35();
        let Ok(code) = RankCode::new(f.clone(), Matrix::new(2, 4, rows).unwrap()) else { return Ok(()) };
        let dual = code.dual().unwrap();
        prop_assert_eq!(dual.k(), 2);
        let prod = linalg::mul(f.as_ref(), code.generator(), &dual.generator().transpose()).unwrap();
        prop_assert!(prod.entries().iter().all(|&e| e == Fqm::ZERO));
        prop_assert!(dual.dual().unwrap().same_code(&code));
    }
}
