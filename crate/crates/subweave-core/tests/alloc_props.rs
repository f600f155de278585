//! Property tests for proportional size allocation: exact totals, floor
//! respect, sub-unit deviation from real-valued shares, and monotonicity.

use proptest::prelude::*;
use subweave_core::allocate::allocate_sizes;
use subweave_core::Error;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Sizes sum exactly to the total and never fall below the floors
    /// (with 1 as the implicit minimum).
    #[test]
    fn totals_and_floors_hold(
        unions in prop::collection::vec(1usize..10_000, 1..12),
        floors_raw in prop::collection::vec(0usize..60, 1..12),
        slack in 0usize..5_000,
    ) {
        let n = unions.len().min(floors_raw.len());
        let unions = &unions[..n];
        let floors = &floors_raw[..n];
        let floor_sum: usize = floors.iter().map(|&f| f.max(1)).sum();
        let total = floor_sum + slack;
        let plan = allocate_sizes(unions, floors, total).unwrap();
        prop_assert_eq!(plan.cluster_sizes().iter().sum::<usize>(), total);
        for (i, &size) in plan.cluster_sizes().iter().enumerate() {
            prop_assert!(size >= floors[i].max(1));
        }
        prop_assert_eq!(plan.total_size(), total);
        prop_assert_eq!(plan.cluster_unions(), unions);
        let effective: Vec<usize> = floors.iter().map(|&f| f.max(1)).collect();
        prop_assert_eq!(plan.floors(), effective.as_slice());
    }

    /// Clusters whose share falls below the floor sit exactly at the
    /// floor; every other size is within one unit of its real-valued
    /// share of the budget left after those reservations.
    #[test]
    fn sizes_stay_within_one_of_real_shares(
        unions in prop::collection::vec(1usize..10_000, 1..12),
        slack in 0usize..50_000,
    ) {
        let floors = vec![0usize; unions.len()];
        let total = unions.len() + slack;
        let plan = allocate_sizes(&unions, &floors, total).unwrap();
        // Recompute which clusters get reserved their minimum: a cluster
        // pins when its share of the unpinned pool is below its floor.
        let n = unions.len();
        let mut pinned = vec![false; n];
        let (remaining, pool) = loop {
            let remaining = total - pinned.iter().filter(|&&p| p).count();
            let pool: usize = (0..n).filter(|&i| !pinned[i]).map(|i| unions[i]).sum();
            let mut changed = false;
            for i in 0..n {
                let quota = unions[i] as f64 * remaining as f64 / pool as f64;
                if !pinned[i] && quota < 1.0 {
                    pinned[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break (remaining, pool);
            }
        };
        for (i, &size) in plan.cluster_sizes().iter().enumerate() {
            if pinned[i] {
                prop_assert_eq!(size, 1);
            } else {
                let quota = unions[i] as f64 * remaining as f64 / pool as f64;
                prop_assert!(
                    (size as f64 - quota).abs() < 1.0,
                    "size {} vs share {}", size, quota
                );
            }
        }
    }

    /// Larger unions never receive smaller budgets, and equal unions
    /// resolve in favor of the earlier cluster.
    #[test]
    fn unfloored_allocation_is_monotone_in_union_size(
        unions in prop::collection::vec(1usize..1_000, 2..10),
        slack in 0usize..5_000,
    ) {
        let floors = vec![0usize; unions.len()];
        let total = unions.len() + slack;
        let sizes = allocate_sizes(&unions, &floors, total).unwrap().cluster_sizes().to_vec();
        for i in 0..unions.len() {
            for j in 0..unions.len() {
                if unions[i] > unions[j] {
                    prop_assert!(sizes[i] >= sizes[j]);
                } else if unions[i] == unions[j] && i < j {
                    prop_assert!(sizes[i] >= sizes[j]);
                }
            }
        }
    }

    /// Allocation is deterministic and rejects totals below the floor sum.
    #[test]
    fn deterministic_and_infeasible_totals_rejected(
        unions in prop::collection::vec(1usize..1_000, 1..8),
        floors_raw in prop::collection::vec(0usize..40, 1..8),
    ) {
        let n = unions.len().min(floors_raw.len());
        let unions = &unions[..n];
        let floors = &floors_raw[..n];
        let floor_sum: usize = floors.iter().map(|&f| f.max(1)).sum();
        let plan = allocate_sizes(unions, floors, floor_sum).unwrap();
        prop_assert_eq!(plan.cluster_sizes().iter().sum::<usize>(), floor_sum);
        prop_assert_eq!(&allocate_sizes(unions, floors, floor_sum).unwrap(), &plan);
        if floor_sum > 0 {
            let rejected = matches!(
                allocate_sizes(unions, floors, floor_sum - 1),
                Err(Error::TotalBelowFloors { .. })
            );
            prop_assert!(rejected);
        }
    }
}
