use pachner_core::cocycle2weight::reconstruct_f;
use pachner_core::edgeops::{extract_w_cocycle, normalize_family};
use pachner_core::linalg::{self, CMatrix};
use pachner_core::operators::{annihilator_of, isotropic_span_from_f};
use pachner_core::pachner::{reconcile, side_weight, verify_33, Side};
use pachner_core::sampling::{annulus_point, random_cocycle, random_weight_matrix};
use pachner_core::simplicial::tets_of;
use pachner_core::weights::{from_canonical_ratios, gaussian_weight};
use pachner_core::{GeneratorSpace, GrassmannElement, OperatorSubspace, SimplexComplex, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const S: [u32; 5] = [1, 2, 3, 4, 5];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn element(n: usize) -> impl Strategy<Value = Vec<(u32, f64, f64)>> {
    prop::collection::vec((0u32..(1 << n), -1.0..1.0f64, -1.0..1.0f64), 0..12)
}

/// Dense `32 × 32` matrix of an operator acting on the 5-generator algebra.
fn dense(op: &pachner_core::LinearOperator, space: &std::sync::Arc<GeneratorSpace>) -> CMatrix {
    let mut m = CMatrix::zeros(32, 32);
    for mask in 0..32u32 {
        let e = GrassmannElement::monomial(space, mask, C64::new(1.0, 0.0));
        for (row, c) in op.apply(&e).unwrap().to_dense().into_iter().enumerate() {
            m[(row, mask as usize)] = c;
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubled_generators_vanish(f in element(5), g in element(5), i in 0usize..5) {
        let s = GeneratorSpace::new(tets_of(&[1, 2, 3, 4, 5, 6]).into_iter().take(5)).unwrap();
        let build = |t: &[(u32, f64, f64)]| GrassmannElement::from_terms(&s, t.iter().map(|&(m, a, b)| (m, C64::new(a, b))));
        let xi = GrassmannElement::generator(&s, i).unwrap();
        prop_assert!(xi.multiply(&xi).unwrap().is_zero());
        let p = xi.multiply(&build(&f)).unwrap().multiply(&xi.multiply(&build(&g)).unwrap()).unwrap();
        prop_assert!(p.is_zero());
    }

    #[test]
    fn f_span_is_isotropic_and_kills_only_the_gaussian(seed in any::<u64>()) {
        let f = random_weight_matrix(&mut rng(seed), S);
        let v = isotropic_span_from_f(&f).unwrap();
        prop_assert!(v.max_scalar_product().unwrap() <= 1e-12);
        let space = f.space();
        let w = gaussian_weight(&f).unwrap();
        let stacked = v.basis().iter().map(|d| dense(d, &space)).fold(CMatrix::zeros(0, 32), |acc, m| {
            let mut out = CMatrix::zeros(acc.nrows() + 32, 32);
            out.rows_mut(0, acc.nrows()).copy_from(&acc);
            out.rows_mut(acc.nrows(), 32).copy_from(&m);
            out
        });
        let k = linalg::nullspace(&stacked, 1e-10);
        prop_assert_eq!(k.ncols(), 1);
        let kv: Vec<C64> = k.column(0).iter().copied().collect();
        prop_assert!(linalg::proportionality(&w.to_dense(), &kv).1 <= 1e-10);
        let ann = annihilator_of(&w, &[0, 1, 2, 3, 4]).unwrap();
        prop_assert_eq!(ann.dim(), 5);
    }

    #[test]
    fn canonical_ratios_determine_f(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ratios: [C64; 5] = std::array::from_fn(|_| annulus_point(&mut r));
        let f = from_canonical_ratios(S, &ratios).unwrap();
        let back = f.canonical_double_ratios().unwrap();
        for k in 0..5 {
            prop_assert!((back[k] - ratios[k]).norm() <= 1e-10 * ratios[k].norm());
        }
    }

    #[test]
    fn cocycle_weight_cocycle_is_stable(seed in any::<u64>()) {
        let f = random_weight_matrix(&mut rng(seed), S);
        let w = extract_w_cocycle(&normalize_family(&f).unwrap()).unwrap();
        let g = reconstruct_f(&w).unwrap();
        let w2 = extract_w_cocycle(&normalize_family(&g).unwrap()).unwrap();
        prop_assert!(w2.proportionality_residual(&w) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn side_annihilators_are_maximal_isotropic(seed in any::<u64>()) {
        let cx = SimplexComplex::boundary_of_5_simplex([1, 2, 3, 4, 5, 6]).unwrap();
        let rw = reconcile(&random_cocycle(&mut rng(seed), &cx)).unwrap();
        let all: Vec<usize> = (0..9).collect();
        let mut spaces: Vec<OperatorSubspace> = Vec::new();
        for side in [Side::Lhs, Side::Rhs] {
            let a = annihilator_of(&side_weight(&rw, side).unwrap(), &all).unwrap();
            prop_assert_eq!(a.dim(), 9);
            prop_assert!(a.max_scalar_product().unwrap() <= 1e-10);
            spaces.push(a);
        }
        let angle = spaces[0].max_principal_sine(&spaces[1]).unwrap();
        let (res, k) = verify_33(&rw).unwrap();
        prop_assert!(angle <= 1e-8);
        prop_assert!(res <= 1e-8 && k.norm() > 1e-10);
    }
}
