//! Language vectors over the global vocabulary and spherical k-means.
//!
//! Each language is a binary vector with bit i set iff global piece i is in
//! the language's vocabulary. Languages are clustered by k-means under
//! cosine distance: points and centroids live on the unit sphere, centroids
//! are member means renormalized to unit length.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rng::{self, DetRng};
use crate::vocab::Vocabulary;
use crate::{Error, Result};

/// Restart count used by [`kmeans`]; each restart draws its own k-means++
/// initialization and the lowest-inertia model wins.
pub const DEFAULT_RESTARTS: usize = 10;

/// Lloyd-iteration cap per restart.
const MAX_ITERATIONS: usize = 300;

/// A language's binary membership vector over the global vocabulary,
/// stored as the sorted indices of its set bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageVector {
    language: String,
    indices: Vec<u32>,
    dim: usize,
}

impl LanguageVector {
    /// Builds a vector from set-bit indices; they are sorted and deduplicated.
    pub fn new(language: impl Into<String>, set_bits: &[usize], dim: usize) -> Result<Self> {
        let mut indices: Vec<u32> = Vec::with_capacity(set_bits.len());
        for &b in set_bits {
            if b >= dim {
                return Err(Error::InvalidConfig(alloc::format!(
                    "bit {b} out of range for dimension {dim}"
                )));
            }
            indices.push(b as u32);
        }
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::ZeroVector);
        }
        Ok(LanguageVector {
            language: language.into(),
            indices,
            dim,
        })
    }

    /// The language this vector describes.
    pub fn language(&self) -> &str {
        &self.language
    }

    /// Sorted indices of the set bits.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// Vector dimension (the global vocabulary size).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of set bits; always positive.
    pub fn count_ones(&self) -> usize {
        self.indices.len()
    }

    /// The vector as a dense 0/1 array.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &i in &self.indices {
            v[i as usize] = 1.0;
        }
        v
    }
}

/// Encodes one language's vocabulary as a binary vector over the global
/// vocabulary's canonical piece order.
///
/// Every piece of `vl`, UNK included, must be present in `global`; the
/// global vocabulary is a union of the per-language ones, so a missing piece
/// means the inputs don't belong to the same run.
pub fn encode_language(
    language: &str,
    vl: &Vocabulary,
    global: &Vocabulary,
) -> Result<LanguageVector> {
    let mut set = Vec::with_capacity(vl.len());
    for p in vl.pieces() {
        match global.index_of(&p.text) {
            Some(i) => set.push(i),
            None => {
                return Err(Error::PieceMissingFromGlobal {
                    piece: p.text.clone(),
                })
            }
        }
    }
    LanguageVector::new(language, &set, global.len())
}

/// Cosine distance `1 − u·v / (|u||v|)`; in [0, 1] for non-negative vectors.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(1.0 - dot / libm::sqrt(nu * nv))
}

/// A fitted clustering of languages.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    k: usize,
    seed: u64,
    assignments: Vec<(String, usize)>,
    centroids: Vec<Vec<f64>>,
    inertia: f64,
    inertia_trace: Vec<f64>,
}

impl ClusterModel {
    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    /// The seed the model was fitted with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// (language, cluster) pairs in input order.
    pub fn assignments(&self) -> &[(String, usize)] {
        &self.assignments
    }

    /// Cluster index of one language.
    pub fn assignment(&self, language: &str) -> Option<usize> {
        self.assignments
            .iter()
            .find(|(l, _)| l == language)
            .map(|&(_, c)| c)
    }

    /// Languages of each cluster, in input order; no cluster is empty.
    pub fn clusters(&self) -> Vec<Vec<&str>> {
        let mut out = vec![Vec::new(); self.k];
        for (l, c) in &self.assignments {
            out[*c].push(l.as_str());
        }
        out
    }

    /// Unit-norm centroids, one per cluster.
    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    /// Final objective: sum of cosine distances to assigned centroids.
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// Objective after each Lloyd iteration of the winning restart; never
    /// increases from one entry to the next.
    pub fn inertia_trace(&self) -> &[f64] {
        &self.inertia_trace
    }
}

/// Distance between two normalized binary points: `1 − |a∩b| / √(|a||b|)`.
fn binary_distance(a: &[u32], b: &[u32]) -> f64 {
    let mut shared = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    1.0 - shared as f64 / libm::sqrt((a.len() * b.len()) as f64)
}

/// Distance from a normalized binary point to a unit-norm centroid.
fn centroid_distance(point: &[u32], unit: f64, centroid: &[f64]) -> f64 {
    let mut dot = 0.0;
    for &i in point {
        dot += centroid[i as usize];
    }
    1.0 - unit * dot
}

/// Clusters languages with spherical k-means, [`DEFAULT_RESTARTS`] restarts.
pub fn kmeans(vectors: &[LanguageVector], k: usize, seed: u64) -> Result<ClusterModel> {
    kmeans_with_restarts(vectors, k, seed, DEFAULT_RESTARTS)
}

/// [`kmeans`] with an explicit restart count (at least 1). Each restart uses
/// an independent random stream derived from `seed`; the strictly lowest
/// inertia wins, earlier restarts winning ties, so results are reproducible.
pub fn kmeans_with_restarts(
    vectors: &[LanguageVector],
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<ClusterModel> {
    if k == 0 || k > vectors.len() {
        return Err(Error::InvalidClusterCount {
            k,
            languages: vectors.len(),
        });
    }
    if restarts == 0 {
        return Err(Error::InvalidConfig(String::from(
            "restarts must be positive",
        )));
    }
    let dim = vectors[0].dim();
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.dim(),
            });
        }
    }
    let mut seen = alloc::collections::BTreeSet::new();
    for v in vectors {
        if !seen.insert(v.language()) {
            return Err(Error::DuplicateLanguage(String::from(v.language())));
        }
    }
    // Clustering must not depend on caller ordering: seeding draws points by
    // index, so canonicalize to language-code order before any random choice.
    // The partition and labels are then functions of the (language, vector)
    // set alone.
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_unstable_by(|&a, &b| vectors[a].language().cmp(vectors[b].language()));
    let sorted: Vec<LanguageVector> = order.iter().map(|&i| vectors[i].clone()).collect();
    // Unit value of each point's set components after L2 normalization.
    let units: Vec<f64> = sorted
        .iter()
        .map(|v| 1.0 / libm::sqrt(v.count_ones() as f64))
        .collect();
    let mut best: Option<(Vec<usize>, Vec<Vec<f64>>, f64, Vec<f64>)> = None;
    for r in 0..restarts {
        let mut rng = rng::substream(seed, r as u64);
        let run = lloyd(&sorted, &units, dim, k, &mut rng);
        if best.as_ref().is_none_or(|b| run.2 < b.2) {
            best = Some(run);
        }
    }
    let (assign, centroids, inertia, trace) = best.expect("at least one restart");
    let mut by_input = vec![0usize; vectors.len()];
    for (pos, &i) in order.iter().enumerate() {
        by_input[i] = assign[pos];
    }
    Ok(ClusterModel {
        k,
        seed,
        assignments: vectors
            .iter()
            .zip(&by_input)
            .map(|(v, &c)| (String::from(v.language()), c))
            .collect(),
        centroids,
        inertia,
        inertia_trace: trace,
    })
}

/// One restart: k-means++ seeding then Lloyd iterations to a stable
/// assignment (or the iteration cap).
fn lloyd(
    vectors: &[LanguageVector],
    units: &[f64],
    dim: usize,
    k: usize,
    rng: &mut DetRng,
) -> (Vec<usize>, Vec<Vec<f64>>, f64, Vec<f64>) {
    let n = vectors.len();
    // k-means++ over the points themselves: the next center is drawn with
    // probability proportional to squared distance to the nearest chosen
    // center. A zero total (all points already coincide with centers) falls
    // back to the lowest-index unchosen point.
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut is_chosen = vec![false; n];
    let first = rng::uniform_below(rng, n);
    chosen.push(first);
    is_chosen[first] = true;
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| binary_distance(vectors[i].indices(), vectors[first].indices()))
        .collect();
    while chosen.len() < k {
        let weights: Vec<f64> = nearest
            .iter()
            .enumerate()
            .map(|(i, &d)| if is_chosen[i] { 0.0 } else { d * d })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let target = rng::uniform_f64(rng) * total;
            let mut cumulative = 0.0;
            let mut picked = None;
            for (i, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                cumulative += w;
                if cumulative > target {
                    picked = Some(i);
                    break;
                }
            }
            // Rounding can leave the target at or past the final cumulative
            // weight; the last weighted point takes it.
            picked.unwrap_or_else(|| {
                weights
                    .iter()
                    .rposition(|&w| w > 0.0)
                    .expect("total was positive")
            })
        } else {
            (0..n).find(|&i| !is_chosen[i]).expect("k <= n")
        };
        chosen.push(pick);
        is_chosen[pick] = true;
        for i in 0..n {
            let d = binary_distance(vectors[i].indices(), vectors[pick].indices());
            if d < nearest[i] {
                nearest[i] = d;
            }
        }
    }
    let mut centroids: Vec<Vec<f64>> = chosen
        .iter()
        .map(|&p| {
            let mut c = vec![0.0; dim];
            for &i in vectors[p].indices() {
                c[i as usize] = units[p];
            }
            c
        })
        .collect();

    let mut assign = vec![0usize; n];
    let mut trace = Vec::new();
    let mut inertia = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        // Assignment: nearest centroid, ties to the lowest cluster index.
        let mut next = vec![0usize; n];
        for (i, v) in vectors.iter().enumerate() {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = centroid_distance(v.indices(), units[i], centroid);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            next[i] = best_c;
        }
        // Repair empty clusters with the farthest point of any cluster that
        // can spare one, so every returned cluster is non-empty. The moved
        // point sits at distance 0 from the centroid rebuilt around it,
        // which keeps the objective non-increasing.
        let mut sizes = vec![0usize; k];
        for &c in &next {
            sizes[c] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let mut donor: Option<(usize, f64)> = None;
            for (i, v) in vectors.iter().enumerate() {
                if sizes[next[i]] < 2 {
                    continue;
                }
                let d = centroid_distance(v.indices(), units[i], &centroids[next[i]]);
                if donor.is_none_or(|(_, bd)| d > bd) {
                    donor = Some((i, d));
                }
            }
            let (point, _) = donor.expect("k <= points guarantees a donor");
            sizes[next[point]] -= 1;
            sizes[empty] += 1;
            next[point] = empty;
        }
        // Centroid update: member mean, renormalized to the unit sphere.
        for c in centroids.iter_mut() {
            c.iter_mut().for_each(|x| *x = 0.0);
        }
        for (i, v) in vectors.iter().enumerate() {
            let c = &mut centroids[next[i]];
            for &idx in v.indices() {
                c[idx as usize] += units[i];
            }
        }
        for c in centroids.iter_mut() {
            let norm = libm::sqrt(c.iter().map(|x| x * x).sum());
            for x in c.iter_mut() {
                *x /= norm;
            }
        }
        inertia = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| centroid_distance(v.indices(), units[i], &centroids[next[i]]))
            .sum();
        trace.push(inertia);
        let stable = next == assign && trace.len() > 1;
        assign = next;
        if stable {
            break;
        }
    }
    (assign, centroids, inertia, trace)
}
