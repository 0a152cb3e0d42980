//! Every grouping and join variant against the naive reference operators,
//! plus generator and file-format invariants.

use dqo_core::grouping::{group, key_directory, GroupAux};
use dqo_core::io::{decode_relation, encode_relation};
use dqo_core::join::{join, JoinAux};
use dqo_core::oracle::{oracle_group, oracle_join, row_multiset};
use dqo_core::{
    generate_dataset, generate_fk_pair, infer_props, AlgoId, DatasetSpec, FkSpec, Relation,
};
use proptest::prelude::*;

fn dataset_spec() -> impl Strategy<Value = DatasetSpec> {
    (1usize..3000, any::<bool>(), any::<bool>(), any::<u64>()).prop_flat_map(
        |(n_rows, sorted, dense, seed)| {
            (1..=n_rows).prop_map(move |n_groups| DatasetSpec {
                n_rows,
                n_groups,
                sorted,
                dense,
                seed,
            })
        },
    )
}

fn fk_spec() -> impl Strategy<Value = FkSpec> {
    (1usize..500, 1usize..1500, any::<[bool; 3]>(), any::<u64>()).prop_flat_map(
        |(n_r, n_s, [r_sorted, s_sorted, dense], seed)| {
            (1..=n_r).prop_map(move |n_groups| FkSpec {
                n_r,
                n_s,
                n_groups,
                r_sorted,
                s_sorted,
                dense,
                seed,
            })
        },
    )
}

/// Runs `algo` with the side information it needs, if its precondition
/// holds for `rel`.
fn run_group(algo: AlgoId, rel: &Relation) -> Option<dqo_core::GroupResult> {
    let props = infer_props(rel);
    let dir = key_directory(rel.keys());
    let aux = match algo {
        AlgoId::Og if !props.sorted => return None,
        AlgoId::Sphg if !props.dense => return None,
        AlgoId::Sphg => GroupAux::dense(props.n_groups as usize),
        AlgoId::Bsg => GroupAux::directory(&dir),
        _ => GroupAux::default(),
    };
    Some(group(algo, rel, aux).unwrap())
}

fn run_join(algo: AlgoId, r: &Relation, s: &Relation) -> Option<Relation> {
    let r_props = infer_props(r);
    let s_props = infer_props(s);
    let dir = key_directory(r.keys());
    let aux = match algo {
        AlgoId::Oj if !(r_props.sorted && s_props.sorted) => return None,
        AlgoId::Sphj if !r_props.dense => return None,
        AlgoId::Sphj => JoinAux::dense(r_props.n_groups as usize),
        AlgoId::Bsj => JoinAux::directory(&dir),
        _ => JoinAux::default(),
    };
    Some(join(algo, r, s, aux).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grouping_variants_agree_with_oracle(spec in dataset_spec()) {
        let rel = generate_dataset(&spec).unwrap();
        let expected = oracle_group(&rel);
        prop_assert_eq!(expected.len(), spec.n_groups);
        for algo in AlgoId::GROUPING {
            if let Some(got) = run_group(algo, &rel) {
                prop_assert_eq!(got.canonical(), expected.clone(), "{}", algo);
            }
        }
    }

    #[test]
    fn join_variants_agree_with_oracle(spec in fk_spec()) {
        let (r, s) = generate_fk_pair(&spec).unwrap();
        let expected = row_multiset(&oracle_join(&r, &s));
        prop_assert_eq!(expected.len(), spec.n_s);
        for algo in AlgoId::JOIN {
            if let Some(got) = run_join(algo, &r, &s) {
                prop_assert_eq!(row_multiset(&got), expected.clone(), "{}", algo);
            }
        }
    }

    #[test]
    fn generated_data_has_requested_props(spec in dataset_spec()) {
        let rel = generate_dataset(&spec).unwrap();
        let props = infer_props(&rel);
        prop_assert_eq!(rel.n_rows(), spec.n_rows);
        prop_assert_eq!(props.n_groups as usize, spec.n_groups);
        prop_assert_eq!(props.dense, spec.dense);
        if spec.sorted {
            prop_assert!(props.sorted);
        }
        if spec.dense {
            prop_assert!(rel.keys().iter().all(|&k| (k as usize) < spec.n_groups));
        }
    }

    #[test]
    fn fk_pair_is_referentially_intact(spec in fk_spec()) {
        let (r, s) = generate_fk_pair(&spec).unwrap();
        let r_props = infer_props(&r);
        prop_assert_eq!(r_props.n_groups as usize, spec.n_r);
        prop_assert_eq!(r_props.dense, spec.dense);
        if spec.r_sorted {
            prop_assert!(r_props.sorted);
        }
        if spec.s_sorted {
            prop_assert!(infer_props(&s).sorted);
        }
        let ids: std::collections::HashSet<u32> = r.keys().iter().copied().collect();
        prop_assert!(s.keys().iter().all(|k| ids.contains(k)));
        let a_values: std::collections::BTreeSet<u64> =
            r.payload().unwrap().iter().copied().collect();
        prop_assert_eq!(a_values.len(), spec.n_groups);
    }

    #[test]
    fn same_seed_same_data(spec in dataset_spec()) {
        prop_assert_eq!(generate_dataset(&spec).unwrap(), generate_dataset(&spec).unwrap());
    }

    #[test]
    fn file_format_round_trips(
        keys in prop::collection::vec(any::<u32>(), 0..200),
        with_payload in any::<bool>(),
        salt in any::<u64>(),
    ) {
        let payload = with_payload
            .then(|| keys.iter().map(|&k| (k as u64).wrapping_mul(salt)).collect());
        let rel = Relation::new(keys, payload).unwrap();
        let bytes = encode_relation(&rel);
        prop_assert_eq!(decode_relation(&bytes).unwrap(), rel);
    }

    #[test]
    fn truncated_files_are_rejected(keys in prop::collection::vec(any::<u32>(), 1..50), cut in 1usize..8) {
        let bytes = encode_relation(&Relation::from_keys(keys));
        let cut = cut.min(bytes.len());
        prop_assert!(decode_relation(&bytes[..bytes.len() - cut]).is_err());
    }
}

#[test]
fn order_based_variants_reject_unsorted_input() {
    let rel = Relation::from_keys(vec![2, 1, 2]);
    assert!(group(AlgoId::Og, &rel, GroupAux::default()).is_err());
    let r = Relation::new(vec![1, 0], Some(vec![0, 0])).unwrap();
    let s = Relation::from_keys(vec![0, 1]);
    assert!(join(AlgoId::Oj, &r, &s, JoinAux::default()).is_err());
}

#[test]
fn empty_probe_side_joins_to_nothing() {
    let r = Relation::new(vec![0, 1], Some(vec![5, 6])).unwrap();
    let s = Relation::from_keys(vec![]);
    let dir = key_directory(r.keys());
    for algo in AlgoId::JOIN {
        let aux = JoinAux {
            n_groups: Some(2),
            group_keys: Some(&dir),
        };
        assert!(join(algo, &r, &s, aux).unwrap().is_empty(), "{algo}");
    }
}
