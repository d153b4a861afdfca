use cycleset::brace::{BraceOptions, PermutationBrace};
use cycleset::classify::{build_pq, cyclic_cycle_set, PqSpec};
use cycleset::cycle_set::verify_ybe;
use cycleset::extension::*;
use cycleset::iso::{canonical_form, find_iso};
use cycleset::oracle::{enumerate_all, OracleOptions};
use cycleset::structure::{is_indecomposable, retraction, CycleSetHom};
use cycleset::{CycleSet, Permutation};
use proptest::prelude::*;
use proptest::sample::select;
use std::collections::BTreeSet;
use std::sync::OnceLock;

/// Every labeled cycle set of size ≤ 4 plus the indecomposable classes of size 5 and 6.
fn pool() -> &'static Vec<CycleSet> {
    static POOL: OnceLock<Vec<CycleSet>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut v = Vec::new();
        for n in 1..=4 {
            v.extend(enumerate_all(n, &OracleOptions::default()).unwrap().members);
        }
        let ind = OracleOptions {
            indecomposable: true,
            up_to_iso: true,
            ..OracleOptions::default()
        };
        for n in [5, 6] {
            v.extend(enumerate_all(n, &ind).unwrap().members);
        }
        v
    })
}

fn pool_member() -> impl Strategy<Value = CycleSet> {
    (0..pool().len()).prop_map(|i| pool()[i].clone())
}

fn relabeled() -> impl Strategy<Value = (CycleSet, CycleSet)> {
    pool_member()
        .prop_flat_map(|x| {
            let n = x.n();
            (Just(x), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        })
        .prop_map(|(x, p)| {
            let y = x.relabel(&Permutation::from_images(p).unwrap());
            (x, y)
        })
}

fn pq_spec() -> impl Strategy<Value = PqSpec> {
    select(vec![(2usize, 3usize), (3, 2), (2, 5), (5, 2), (3, 5)]).prop_flat_map(|(m, k)| {
        proptest::collection::vec(0..k as u64, m).prop_map(move |g| PqSpec::new(m, k, g))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_satisfy_ybe_and_round_trip((_, y) in relabeled()) {
        let s = y.to_solution();
        prop_assert!(verify_ybe(&s).passed());
        prop_assert_eq!(CycleSet::from_solution(&s).unwrap(), y);
    }

    #[test]
    fn canonical_form_is_relabeling_invariant((x, y) in relabeled()) {
        prop_assert_eq!(canonical_form(&x), canonical_form(&y));
        prop_assert!(find_iso(&x, &y).is_some());
    }

    #[test]
    fn json_round_trip((_, y) in relabeled()) {
        prop_assert_eq!(CycleSet::from_json(&y.to_json()).unwrap(), y);
    }

    #[test]
    fn retraction_is_an_extension((_, y) in relabeled()) {
        let (r, h) = retraction(&y).unwrap();
        prop_assert!(h.is_surjective());
        prop_assert!(CycleSetHom::new(y.clone(), r, h.map).is_ok());
    }

    #[test]
    fn pq_builds_are_valid_or_rejected(spec in pq_spec()) {
        match build_pq(&spec) {
            Ok(x) => {
                prop_assert!(spec.validate().is_ok());
                prop_assert!(is_indecomposable(&x));
                prop_assert!(verify_ybe(&x.to_solution()).passed());
            }
            Err(_) => prop_assert!(spec.validate().is_err()),
        }
    }

    #[test]
    fn brace_axioms_on_pq_builds(spec in pq_spec(), seed in any::<u64>()) {
        if let Ok(x) = build_pq(&spec) {
            let b = PermutationBrace::build(&x, 1 << 20).unwrap();
            let opts = BraceOptions { exhaustive_up_to: 50, samples: 500, seed, ..BraceOptions::default() };
            prop_assert!(b.verify(&opts).passed());
            prop_assert!(b.verify_socle_conjugation().passed());
        }
    }

    #[test]
    fn parallel_equals_twisted_and_is_lv(n in 2usize..6, d in 2u64..6, seed in proptest::collection::vec(0u64..6, 6)) {
        let base = cyclic_cycle_set(n);
        let gamma = GammaMap::from_fn(&base, &[d], |x, y| vec![seed[(y + n - x) % n]]);
        prop_assert!(is_lv_cocycle(&gamma));
        let (m, phi) = gamma.as_cocycle();
        let (a, _) = parallel_extension(&gamma).unwrap();
        let (b, _) = twisted_extension(&m, &phi).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn equivariant_maps_give_cycle_sets(k in 0u64..3, g in 0u64..3) {
        // Sign module over Z_2: Φ(x,x) = k and Φ(x,y) = ±g keeps equivariance.
        let base = cyclic_cycle_set(2);
        let m = GradedModule::new(base, vec![vec![3], vec![3]], vec![vec![vec![vec![2]]; 2]; 2]).unwrap();
        let phi = Cocycle::from_fn(&m, |x, y| vec![if x == y { k * [1, 2][x] } else { g * [1, 2][x] }]);
        if check_equivariance(&m, &phi, true) {
            let (y, proj) = twisted_extension(&m, &phi).unwrap();
            prop_assert!(CycleSet::validate(&y.rows()).is_ok());
            prop_assert!(proj.is_surjective());
        }
    }

    #[test]
    fn coboundary_shift_is_cohomologous(c0 in 0u64..3, c1 in 0u64..3, g in 0u64..3) {
        let base = cyclic_cycle_set(2);
        let m = GradedModule::permutation_module(&base, &[3]);
        let phi = Cocycle::from_fn(&m, |x, y| vec![if x == y { 0 } else { g }]);
        let shifted = shift_by_coboundary(&m, &phi, &[vec![c0], vec![c1]]);
        prop_assert!(is_twisted_cocycle(&m, &shifted));
        prop_assert!(cohomologous(&m, &shifted, &phi).unwrap().is_some());
    }
}

#[test]
fn enumeration_is_duplicate_free_and_valid() {
    for n in 1..=4 {
        let list = enumerate_all(n, &OracleOptions::default()).unwrap().members;
        let distinct: BTreeSet<&CycleSet> = list.iter().collect();
        assert_eq!(distinct.len(), list.len());
        for x in &list {
            assert!(CycleSet::validate(&x.rows()).is_ok());
        }
    }
}

#[test]
fn class_counts_are_stable() {
    let iso = OracleOptions {
        up_to_iso: true,
        ..OracleOptions::default()
    };
    let counts: Vec<usize> = (1..=5)
        .map(|n| enumerate_all(n, &iso).unwrap().members.len())
        .collect();
    assert_eq!(counts, vec![1, 2, 5, 23, 88]);
    let ind = OracleOptions {
        indecomposable: true,
        ..iso
    };
    let counts: Vec<usize> = (1..=5)
        .map(|n| enumerate_all(n, &ind).unwrap().members.len())
        .collect();
    assert_eq!(counts, vec![1, 1, 1, 5, 1]);
}
