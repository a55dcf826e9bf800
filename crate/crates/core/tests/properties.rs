use ndarray::Array2;
use proptest::prelude::*;
use strank::losses::{
    list_strank_loss, pair_strank_loss, pcc_loss, rank_loss, LossKind, LossSpec, compute_loss, Relations,
};
use strank::metrics::{average_ranks, spearman};
use strank::optim::cosine_lr;

fn matrix(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = Array2<f64>> {
    proptest::collection::vec(lo..hi, rows * cols)
        .prop_map(move |v| Array2::from_shape_vec((rows, cols), v).unwrap())
}

fn counts(rows: usize, cols: usize) -> impl Strategy<Value = Array2<f64>> {
    proptest::collection::vec(0u32..20, rows * cols)
        .prop_map(move |v| Array2::from_shape_vec((rows, cols), v.into_iter().map(f64::from).collect()).unwrap())
}

/// Batch of `2n` rows with genes, counts, scores and the pairing `(2k, 2k+1)`.
fn paired_batch() -> impl Strategy<Value = (Array2<f64>, Array2<f64>, Vec<(usize, usize)>)> {
    (1usize..6, 1usize..4).prop_flat_map(|(n, g)| {
        (counts(2 * n, g), matrix(2 * n, g, -5.0, 5.0))
            .prop_map(move |(e, s)| (e, s, (0..n).map(|k| (2 * k, 2 * k + 1)).collect()))
    })
}

fn close(a: &Array2<f64>, b: &Array2<f64>, tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #[test]
    fn pair_and_list_agree_on_pairs((e, s, pairs) in paired_batch()) {
        let groups: Vec<Vec<usize>> = pairs.iter().map(|&(i, j)| vec![i, j]).collect();
        let p = pair_strank_loss(e.view(), s.view(), &pairs).unwrap();
        let l = list_strank_loss(e.view(), s.view(), &groups, None).unwrap();
        prop_assert!((p.value - l.value).abs() < 1e-10);
        prop_assert!(close(&p.grad, &l.grad, 1e-10));
    }

    #[test]
    fn strank_losses_are_shift_invariant((e, s, pairs) in paired_batch(), c in -10.0f64..10.0) {
        let shifted = s.mapv(|v| v + c);
        let a = pair_strank_loss(e.view(), s.view(), &pairs).unwrap();
        let b = pair_strank_loss(e.view(), shifted.view(), &pairs).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-9);
        prop_assert!(close(&a.grad, &b.grad, 1e-9));
        let groups = vec![(0..e.nrows()).collect::<Vec<_>>()];
        let a = list_strank_loss(e.view(), s.view(), &groups, None).unwrap();
        let b = list_strank_loss(e.view(), shifted.view(), &groups, None).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-9);
        prop_assert!(close(&a.grad, &b.grad, 1e-9));
        let a = rank_loss(e.view(), s.view(), &pairs, 1.0).unwrap();
        let b = rank_loss(e.view(), shifted.view(), &pairs, 1.0).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn losses_are_permutation_equivariant(
        (e, s, pairs) in paired_batch(),
        seed in any::<u64>(),
    ) {
        let n = e.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = strank::sampling::RngStream::new(seed, 0);
        rng.shuffle(&mut perm);
        // Row k of the permuted batch is row perm[k] of the original.
        let mut inv = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let pe = e.select(ndarray::Axis(0), &perm);
        let ps = s.select(ndarray::Axis(0), &perm);
        let ppairs: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (inv[i], inv[j])).collect();
        let pgroups: Vec<Vec<usize>> = ppairs.iter().map(|&(i, j)| vec![i, j]).collect();
        let libs: Vec<f64> = e.rows().into_iter().map(|r| r.sum()).collect();
        let plibs: Vec<f64> = perm.iter().map(|&p| libs[p]).collect();
        let groups: Vec<Vec<usize>> = pairs.iter().map(|&(i, j)| vec![i, j]).collect();
        for kind in LossKind::ALL {
            let spec = LossSpec::new(kind);
            let (rel, prel) = match kind {
                LossKind::Rank | LossKind::PairStrank => {
                    (Relations::Pairs(pairs.clone()), Relations::Pairs(ppairs.clone()))
                }
                LossKind::ListStrank => (Relations::Groups(groups.clone()), Relations::Groups(pgroups.clone())),
                _ => (Relations::None, Relations::None),
            };
            if kind == LossKind::Pcc && n < 2 {
                continue;
            }
            let a = compute_loss(&spec, e.view(), s.view(), &rel, &libs).unwrap();
            let b = compute_loss(&spec, pe.view(), ps.view(), &prel, &plibs).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-9, "{:?}", kind);
            let back = b.grad.select(ndarray::Axis(0), &inv);
            prop_assert!(close(&a.grad, &back, 1e-9), "{:?}", kind);
        }
    }

    #[test]
    fn pair_minimizer_is_count_fraction(ei in 0u32..30, ej in 0u32..30) {
        prop_assume!(ei + ej > 0);
        let e = Array2::from_shape_vec((2, 1), vec![f64::from(ei), f64::from(ej)]).unwrap();
        let t = f64::from(ei + ej);
        let target = f64::from(ei) / t;
        let loss_at = |p: f64| {
            let s = Array2::from_shape_vec((2, 1), vec![(p / (1.0 - p)).ln(), 0.0]).unwrap();
            pair_strank_loss(e.view(), s.view(), &[(0, 1)]).unwrap().value
        };
        let grid: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
        let best = grid.iter().copied().min_by(|a, b| loss_at(*a).total_cmp(&loss_at(*b))).unwrap();
        prop_assert!((best - target).abs() <= 1e-3 + 1e-12, "best {best} target {target}");
    }

    #[test]
    fn pcc_value_in_range(e in counts(8, 2), s in matrix(8, 2, -3.0, 3.0)) {
        let v = pcc_loss(e.view(), s.view()).unwrap().value;
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&v));
    }

    #[test]
    fn spearman_is_invariant_under_increasing_maps(
        xs in proptest::collection::vec(-100.0f64..100.0, 3..40),
        scale in 0.1f64..10.0,
        shift in -5.0f64..5.0,
    ) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(k, x)| (x * 0.3 + k as f64).sin()).collect();
        let base = spearman(&xs, &ys).unwrap();
        let mapped: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        let cubed: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
        prop_assume!(base.is_finite());
        prop_assert!((spearman(&mapped, &ys).unwrap() - base).abs() < 1e-12);
        prop_assert!((spearman(&cubed, &ys).unwrap() - base).abs() < 1e-12);
        prop_assert!((spearman(&ys, &xs).unwrap() - base).abs() < 1e-12);
        let negated: Vec<f64> = xs.iter().map(|x| -x).collect();
        prop_assert!((spearman(&negated, &ys).unwrap() + base).abs() < 1e-12);
    }

    #[test]
    fn average_ranks_sum(xs in proptest::collection::vec(0u8..5, 1..30)) {
        let v: Vec<f64> = xs.iter().map(|&x| f64::from(x)).collect();
        let r = average_ranks(&v);
        let n = v.len() as f64;
        prop_assert!((r.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn cosine_lr_is_bounded_and_monotone(total in 1usize..500, lr0 in 1e-5f64..1.0, frac in 0.0f64..1.0) {
        let lr_min = lr0 * frac;
        let mut prev = f64::INFINITY;
        for step in 0..=total {
            let lr = cosine_lr(step, total, lr0, lr_min).unwrap();
            prop_assert!(lr <= lr0 + 1e-15 && lr >= lr_min - 1e-15);
            prop_assert!(lr <= prev + 1e-15);
            prev = lr;
        }
    }
}
