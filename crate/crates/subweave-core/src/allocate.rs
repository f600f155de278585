//! Proportional vocabulary-size allocation across clusters.
//!
//! Cluster budgets are apportioned proportionally to the sizes of the
//! clusters' vocabulary unions by the largest-remainder method, after
//! reserving each cluster's minimum viable size (its pooled coverage
//! alphabet plus specials).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// How a total vocabulary budget was split across clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationPlan {
    cluster_unions: Vec<usize>,
    cluster_sizes: Vec<usize>,
    floors: Vec<usize>,
    total_size: usize,
}

impl AllocationPlan {
    /// Union-vocabulary size of each cluster, as given.
    pub fn cluster_unions(&self) -> &[usize] {
        &self.cluster_unions
    }

    /// Allocated size per cluster; sums exactly to the total.
    pub fn cluster_sizes(&self) -> &[usize] {
        &self.cluster_sizes
    }

    /// Effective minimum size per cluster (at least 1 each).
    pub fn floors(&self) -> &[usize] {
        &self.floors
    }

    /// The apportioned budget.
    pub fn total_size(&self) -> usize {
        self.total_size
    }
}

/// Splits `total_size` across clusters proportionally to their union sizes.
///
/// `floors[i]` is cluster i's minimum viable vocabulary size (coverage
/// alphabet + specials); an effective floor of at least 1 always applies.
/// Clusters whose proportional share falls below their floor are pinned at
/// the floor and the remainder is re-apportioned over the rest, where the
/// largest-remainder rule rounds: seats go to the largest fractional parts,
/// ties to the larger union, then the lower cluster index.
///
/// The result sums to `total_size` exactly; among unpinned clusters a larger
/// union never receives a smaller size except by the single rounding seat.
pub fn allocate_sizes(
    cluster_unions: &[usize],
    floors: &[usize],
    total_size: usize,
) -> Result<AllocationPlan> {
    if cluster_unions.is_empty() {
        return Err(Error::NoLanguages);
    }
    if floors.len() != cluster_unions.len() {
        return Err(Error::DimensionMismatch {
            left: cluster_unions.len(),
            right: floors.len(),
        });
    }
    if cluster_unions.iter().any(|&u| u == 0) {
        return Err(Error::InvalidConfig(alloc::string::String::from(
            "cluster union sizes must be positive",
        )));
    }
    let effective: Vec<usize> = floors.iter().map(|&f| f.max(1)).collect();
    let floor_sum: usize = effective.iter().sum();
    if total_size < floor_sum {
        return Err(Error::TotalBelowFloors {
            total: total_size,
            floor_sum,
        });
    }
    let k = cluster_unions.len();
    let mut pinned = vec![false; k];
    // Pin clusters whose proportional share cannot reach their floor; each
    // pin shrinks the pool for the rest, so iterate to a fixed point. At
    // least one cluster always stays unpinned: if every share sat below its
    // floor, the shares would sum below the remaining budget they define.
    loop {
        let remaining = total_size
            - effective
                .iter()
                .zip(&pinned)
                .filter(|&(_, &p)| p)
                .map(|(&e, _)| e)
                .sum::<usize>();
        let pool: usize = cluster_unions
            .iter()
            .zip(&pinned)
            .filter(|&(_, &p)| !p)
            .map(|(&u, _)| u)
            .sum();
        let mut changed = false;
        for i in 0..k {
            if pinned[i] {
                continue;
            }
            let quota = remaining as f64 * cluster_unions[i] as f64 / pool as f64;
            if quota < effective[i] as f64 {
                pinned[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let remaining = total_size
        - effective
            .iter()
            .zip(&pinned)
            .filter(|&(_, &p)| p)
            .map(|(&e, _)| e)
            .sum::<usize>();
    let pool: usize = cluster_unions
        .iter()
        .zip(&pinned)
        .filter(|&(_, &p)| !p)
        .map(|(&u, _)| u)
        .sum();
    let mut sizes: Vec<usize> = effective.clone();
    let mut fractions: Vec<(f64, usize)> = Vec::new();
    let mut assigned = 0usize;
    for i in 0..k {
        if pinned[i] {
            continue;
        }
        let quota = remaining as f64 * cluster_unions[i] as f64 / pool as f64;
        let base = quota as usize;
        sizes[i] = base;
        assigned += base;
        fractions.push((quota - base as f64, i));
    }
    let seats = remaining - assigned;
    fractions.sort_unstable_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("fractions are finite")
            .then_with(|| cluster_unions[b.1].cmp(&cluster_unions[a.1]))
            .then_with(|| a.1.cmp(&b.1))
    });
    for &(_, i) in fractions.iter().take(seats) {
        sizes[i] += 1;
    }
    Ok(AllocationPlan {
        cluster_unions: cluster_unions.to_vec(),
        cluster_sizes: sizes,
        floors: effective,
        total_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alloc(unions: &[usize], total: usize) -> AllocationPlan {
        let floors = vec![1; unions.len()];
        allocate_sizes(unions, &floors, total).unwrap()
    }

    #[test]
    fn one_cluster_takes_the_whole_budget() {
        assert_eq!(alloc(&[3156], 2000).cluster_sizes(), [2000]);
    }

    #[test]
    fn exact_proportions_are_allocated_exactly() {
        assert_eq!(alloc(&[100, 300], 400).cluster_sizes(), [100, 300]);
    }

    #[test]
    fn equal_remainders_favor_lower_indices() {
        // Quotas 66.67 each: bases 66, two seats left, all fractions tie,
        // all unions tie, so the seats go to clusters 0 and 1.
        assert_eq!(alloc(&[100, 100, 100], 200).cluster_sizes(), [67, 67, 66]);
    }

    #[test]
    fn sizes_always_sum_to_the_total() {
        for (unions, total) in [
            (vec![1usize, 2, 3], 10usize),
            (vec![7, 13, 17, 23], 101),
            (vec![1000, 1], 57),
        ] {
            let plan = alloc(&unions, total);
            assert_eq!(plan.cluster_sizes().iter().sum::<usize>(), total);
        }
    }

    #[test]
    fn floors_are_respected_and_budget_reflows() {
        // Cluster 0's share of 100 would be ~9, below its floor of 30.
        let plan = allocate_sizes(&[10, 100], &[30, 5], 100).unwrap();
        assert_eq!(plan.cluster_sizes(), [30, 70]);
        assert_eq!(plan.floors(), [30, 5]);
    }

    #[test]
    fn cascading_pins_converge() {
        // Pinning cluster 0 pushes cluster 1 below its floor in turn.
        let plan = allocate_sizes(&[1, 10, 1000], &[40, 40, 1], 120).unwrap();
        assert_eq!(plan.cluster_sizes(), [40, 40, 40]);
        assert_eq!(plan.cluster_sizes().iter().sum::<usize>(), 120);
    }

    #[test]
    fn budget_below_floor_sum_is_rejected() {
        let err = allocate_sizes(&[10, 10], &[50, 60], 100).unwrap_err();
        assert_eq!(
            err,
            Error::TotalBelowFloors {
                total: 100,
                floor_sum: 110
            }
        );
    }

    #[test]
    fn zero_floors_still_guarantee_one_piece_each() {
        let plan = allocate_sizes(&[1, 1_000_000], &[0, 0], 10).unwrap();
        assert!(plan.cluster_sizes()[0] >= 1);
        assert_eq!(plan.cluster_sizes().iter().sum::<usize>(), 10);
    }
}
