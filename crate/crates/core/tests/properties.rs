use hgsc::eigen::sym_eig;
use hgsc::knn::knn_similarity;
use hgsc::overcluster::{overclustering_incidence, overclustering_similarity, CommunityMethod, CommunitySet};
use hgsc::partition::{
    candidate_from_p, discrete_refine, generalized_eig, newton_lanczos, NewtonOptions, RefineOptions,
};
use hgsc::{
    accuracy, cluster, corrupt, degree_matrix, fuse, laplacian, nmi, ClusterOptions, Constraint, CorruptionSpec,
    Criterion, Dataset, FusionWeights, Partition, PartitionCandidate, SymmetricMatrix,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Symmetric `n × n` matrix with unit diagonal and off-diagonal entries in `(0, 1]`.
fn similarity(max_n: usize) -> impl Strategy<Value = SymmetricMatrix> {
    (3..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0.01f64..1.0, n * n).prop_map(move |v| {
            SymmetricMatrix::from_upper_fn(n, |i, j| if i == j { 1.0 } else { v[i * n + j] }).unwrap()
        })
    })
}

fn weights() -> impl Strategy<Value = FusionWeights> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, t)| FusionWeights::new(a, (1.0 - a) * t).unwrap())
}

fn labels(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, n)
}

/// Community set made of two random partitions, so every vertex is covered twice.
fn communities(n: usize, per: usize, first: &[usize], second: &[usize]) -> CommunitySet {
    let mut comms = Vec::new();
    let mut methods = Vec::new();
    for (lab, method) in [(first, CommunityMethod::Classic), (second, CommunityMethod::Multiclass)] {
        let mut groups = vec![Vec::new(); per];
        for (i, &l) in lab.iter().take(n).enumerate() {
            groups[l].push(i);
        }
        for g in groups.into_iter().filter(|g| !g.is_empty()) {
            comms.push(g);
            methods.push(method);
        }
    }
    CommunitySet::new(n, comms, methods).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fusion_of_equal_inputs_is_identity(a in similarity(12), w in weights()) {
        let s = fuse(&a, &a, &a, w).unwrap();
        prop_assert!((s.as_matrix() - a.as_matrix()).amax() <= 1e-15);
    }

    #[test]
    fn fused_similarity_has_unit_diagonal_and_is_symmetric(a in similarity(12), w in weights(), k in 1usize..3) {
        let b = knn_similarity(&a, k).unwrap();
        let s = fuse(&a, &b, &a, w).unwrap();
        prop_assert_eq!(s.max_asymmetry(), 0.0);
        for i in 0..s.dim() {
            prop_assert!((s.get(i, i) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn overclustering_entries_and_weights(
        a in similarity(14),
        la in labels(14, 4),
        lb in labels(14, 4),
    ) {
        let n = a.dim();
        let comms = communities(n, 4, &la, &lb);
        let c = overclustering_similarity(&a, &comms, 3).unwrap();
        for i in 0..n {
            prop_assert!((c.get(i, i) - 1.0).abs() <= 1e-12);
            for j in 0..n {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&c.get(i, j)));
                let share = comms.communities().iter().any(|m| m.contains(&i) && m.contains(&j));
                prop_assert_eq!(c.get(i, j) == 0.0, !share);
            }
        }
        for &mu in overclustering_incidence(&a, &comms, 3).unwrap().weights() {
            prop_assert!(mu > 0.5 - 1e-15 && mu <= 1.0);
        }
    }

    #[test]
    fn nmi_symmetric_permutation_invariant_bounded(a in labels(30, 4), b in labels(30, 5), shift in 1usize..7) {
        let v = nmi(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((nmi(&b, &a).unwrap() - v).abs() <= 1e-12);
        let relabeled: Vec<usize> = a.iter().map(|&l| (l + shift) % 4 + 10 * shift).collect();
        prop_assert!((nmi(&relabeled, &b).unwrap() - v).abs() <= 1e-12);
        prop_assert!((nmi(&a, &a).unwrap() - 1.0).abs() <= 1e-12 || a.iter().all(|&x| x == a[0]));
    }

    #[test]
    fn accuracy_floor_for_balanced_truth(pred in labels(30, 6), shift in 1usize..5) {
        let truth: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let acc = accuracy(&pred, &truth).unwrap();
        prop_assert!(acc >= 1.0 / 3.0 - 1e-15);
        let relabeled: Vec<usize> = pred.iter().map(|&l| (l + shift) % 6).collect();
        prop_assert_eq!(accuracy(&relabeled, &truth).unwrap(), acc);
    }

    #[test]
    fn corruption_is_reproducible(seed in any::<u64>(), level in 0.0f64..2.0, zero in any::<bool>()) {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * i) as f64 * 0.1, 3.0]).collect();
        let ds = Dataset::new(rows, Some((0..20).map(|i| i % 2).collect())).unwrap();
        let spec = if zero { CorruptionSpec::zeroing(level / 2.0, seed) } else { CorruptionSpec::noise(level, seed) };
        let x = corrupt(&ds, &spec).unwrap();
        let y = corrupt(&ds, &spec).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(x.labels(), ds.labels());
    }

    #[test]
    fn top_eigenpairs_meet_residual_contract(m in similarity(20), k in 1usize..4) {
        let e = sym_eig(&m, k).unwrap();
        let norm = m.frobenius_norm();
        for (c, &lambda) in e.values.iter().enumerate() {
            let v = e.vectors.column(c);
            prop_assert!((m.as_matrix() * v - v * lambda).norm() <= 1e-8 * norm);
        }
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let g = e.vectors.tr_mul(&e.vectors);
        prop_assert!((g - DMatrix::identity(k, k)).amax() <= 1e-8);
    }

    #[test]
    fn generalized_eig_is_degree_orthonormal(s in similarity(16), k in 1usize..4) {
        let d = degree_matrix(&s).unwrap();
        let z = generalized_eig(&s, &d, k).unwrap();
        prop_assert_eq!(z.constraint, Constraint::DegreeOrthonormal);
        let g = z.p.transpose() * d.as_matrix() * &z.p;
        prop_assert!((g - DMatrix::identity(k, k)).amax() <= 1e-8);
    }

    #[test]
    fn newton_history_monotone_and_orthonormal(s in similarity(16), k in 1usize..4) {
        let q = laplacian(&s).unwrap();
        let st = newton_lanczos(&s, &q, k, &NewtonOptions::default()).unwrap();
        prop_assert!(st.history.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0)));
        prop_assert!(st.candidate.orthonormality_error() <= 1e-8);
    }

    #[test]
    fn candidate_rows_have_unit_norm(v in prop::collection::vec(-1.0f64..1.0, 30)) {
        let mut p = DMatrix::from_row_slice(10, 3, &v);
        for mut row in p.row_iter_mut() {
            if row.norm() < 1e-6 {
                row[0] = 1.0;
            }
        }
        let cand = PartitionCandidate { p, rho: 0.0, iterations: 0, constraint: Constraint::Orthonormal };
        let xt = candidate_from_p(&cand).unwrap();
        for row in xt.row_iter() {
            prop_assert!((row.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn refinement_gives_valid_partition_with_monotone_phi(v in prop::collection::vec(-1.0f64..1.0, 60), seed in any::<u64>()) {
        let mut xt = DMatrix::from_row_slice(20, 3, &v);
        for mut row in xt.row_iter_mut() {
            let n = row.norm().max(1e-9);
            row /= n;
        }
        let out = discrete_refine(&xt, &RefineOptions { max_iter: 100, seed }).unwrap();
        prop_assert_eq!(out.partition.len(), 20);
        prop_assert!(!out.partition.has_empty_cluster());
        prop_assert!(out.phi_history.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0)));
        let x = out.partition.indicator();
        prop_assert!(x.row_iter().all(|r| r.sum() == 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cluster_is_scale_invariant(s in similarity(14), c in 0.1f64..10.0, seed in 0u64..100) {
        let scaled = s.scaled(c).unwrap();
        for criterion in [Criterion::Dhpc, Criterion::Nc] {
            let opts = ClusterOptions::new(1e-6, seed);
            let a = cluster(&s, 2, &opts, criterion).unwrap();
            let b = cluster(&scaled, 2, &opts, criterion).unwrap();
            let agree = nmi(a.partition.labels(), b.partition.labels()).unwrap();
            prop_assert!(agree == 1.0 || a.partition == b.partition, "{criterion}: {:?} vs {:?}", a.partition, b.partition);
        }
    }

    #[test]
    fn relaxed_optimum_bounds_discrete_ratio(s in similarity(7)) {
        let n = s.dim();
        let q = laplacian(&s).unwrap();
        let st = newton_lanczos(&s, &q, 2, &NewtonOptions::default()).unwrap();
        for code in 1u32..(1 << (n - 1)) {
            let labels: Vec<usize> = (0..n).map(|i| (code >> i & 1) as usize).collect();
            let p = Partition::from_labels(labels, 2).unwrap().scaled_indicator().unwrap();
            let f = (p.transpose() * s.as_matrix() * &p).trace() / (p.transpose() * q.as_matrix() * &p).trace();
            prop_assert!(st.rho >= f - 1e-9 * f.abs().max(1.0));
        }
    }
}
