//! Graded Jordan data of the degree ±1 parts of multiplication by a panel
//! function: partitions refined by level, multiplicity matrices, weight
//! gradings and filtrations, truncation, stratum sampling, and loop exponents.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configmodel::{ConfigError, FnVec};
use crate::exactlin::{
    column_space, graded_chains, image, int, kernel, level_power, nilpotent_partition, orth_complement,
    BilinearForm, GradedChain, LinAlgError, Mat, Scalar, Subspace,
};
use crate::fibre::Fibre;
use crate::filtration::GradedModel;
use crate::liealg::{graded_parts, GradedParts, LieError};
use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NilError {
    #[error("Jordan partition from graded chains {chains} differs from the rank partition {ranks}")]
    JordanMismatch { chains: Partition, ranks: Partition },
    #[error("loop exponent {value} at level {level} exceeds the bound {bound}")]
    LoopBound { level: usize, value: i64, bound: i64 },
    #[error("sample count must be positive")]
    NoSamples,
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

impl NilError {
    pub fn is_invariant_violation(&self) -> bool {
        match self {
            NilError::JordanMismatch { .. } | NilError::LoopBound { .. } => true,
            NilError::Lie(e) => e.is_invariant_violation(),
            _ => false,
        }
    }
}

/// Square matrix of chain counts indexed by `(q, p)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiplicityMatrix(Vec<Vec<usize>>);

impl MultiplicityMatrix {
    pub fn zeros(size: usize) -> Self {
        MultiplicityMatrix(vec![vec![0; size]; size])
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, q: usize, p: usize) -> usize {
        self.0[q][p]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn column_sum(&self, p: usize) -> usize {
        self.0.iter().map(|row| row[p]).sum()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.size()).all(|q| (0..q).all(|p| self.0[q][p] == 0))
    }

    /// The partition `(1^{M₀} 2^{M₁} ...)` with `M_q = Σ_p μ_{qp}`.
    pub fn forget_grading(&self) -> Partition {
        let mults: Vec<usize> = self.0.iter().map(|row| row.iter().sum()).collect();
        Partition::from_multiplicities(&mults)
    }

    /// The matrix predicted for the degree -1 part from this degree +1 matrix:
    /// `μ′_{qp} = μ_{(ℓ-1-q)(ℓ-1-q+p)}`.
    pub fn reflected(&self) -> MultiplicityMatrix {
        let l = self.size();
        let mut out = MultiplicityMatrix::zeros(l);
        for q in 0..l {
            for p in 0..=q {
                out.0[q][p] = self.0[l - 1 - q][l - 1 - q + p];
            }
        }
        out
    }
}

/// The Jordan partition together with its pieces by end level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedPartition {
    pub lambda: Partition,
    /// `λ⁽ᵖ⁾ = (1^{μ₀p} 2^{μ₁p} … (p+1)^{μpp})`.
    pub per_level: Vec<Partition>,
}

impl GradedPartition {
    pub fn from_matrix(m: &MultiplicityMatrix) -> Self {
        let per_level: Vec<Partition> = (0..m.size())
            .map(|p| Partition::from_multiplicities(&(0..=p).map(|q| m.get(q, p)).collect::<Vec<_>>()))
            .collect();
        let lambda = per_level.iter().fold(Partition::empty(), |acc, x| acc.union(x));
        GradedPartition { lambda, per_level }
    }

    /// `hᵖ = Σ_{t ≥ p} (λ⁽ᵗ⁾)′_{t-p+1}`.
    pub fn predicted_hilbert(&self) -> Vec<usize> {
        let l = self.per_level.len();
        (0..l)
            .map(|p| (p..l).map(|t| self.per_level[t].conjugate().part(t - p)).sum())
            .collect()
    }

    /// Whether `λ⁽ᵖ⁾` fits in the `hᵖ × (p+1)` rectangle.
    pub fn fits(&self, hilbert: &[usize]) -> bool {
        self.per_level
            .iter()
            .enumerate()
            .all(|(p, lp)| lp.len() <= hilbert.get(p).copied().unwrap_or(0) && lp.part(0) <= p + 1)
    }
}

/// Graded Jordan chains of one nilpotent part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedJordan {
    levels: usize,
    step: isize,
    chains: Vec<GradedChain>,
}

impl GradedJordan {
    /// Chains of `n`, given in graded coordinates, checked against the
    /// rank-sequence partition. Chain vectors stay in graded coordinates.
    pub fn new(n: &Mat, g: &GradedModel, step: isize) -> Result<Self, NilError> {
        let chains = graded_chains(n, g.offsets(), step)?;
        let j = GradedJordan { levels: g.levels(), step, chains };
        let ranks = nilpotent_partition(n)?;
        if j.partition() != ranks {
            return Err(NilError::JordanMismatch { chains: j.partition(), ranks });
        }
        Ok(j)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn step(&self) -> isize {
        self.step
    }

    pub fn chains(&self) -> &[GradedChain] {
        &self.chains
    }

    pub fn partition(&self) -> Partition {
        Partition::new(self.chains.iter().map(GradedChain::len).collect())
    }

    /// `(q, p)` entry counts chains of length `q+1` ending at level `p`.
    pub fn multiplicities(&self) -> MultiplicityMatrix {
        let mut m = MultiplicityMatrix::zeros(self.levels);
        for c in &self.chains {
            m.0[c.len() - 1][c.end_level] += 1;
        }
        m
    }

    /// Degree -1 convention: `(q, p)` counts chains of length `ℓ-q` ending at level `p`.
    pub fn minus_multiplicities(&self) -> MultiplicityMatrix {
        let l = self.levels;
        let mut m = MultiplicityMatrix::zeros(l);
        for c in &self.chains {
            m.0[l - c.len()][c.end_level] += 1;
        }
        m
    }
}

/// Degree ±1 parts of `t` on the reduced model, in graded coordinates.
fn reduced_parts(fibre: &Fibre, t: &FnVec) -> Result<GradedParts, NilError> {
    Ok(graded_parts(&fibre.to_reduced(t)?, fibre.reduced())?)
}

/// `D⁺(t)` chains on the reduced model; `t` is a panel function on all points.
pub fn plus_jordan(fibre: &Fibre, t: &FnVec) -> Result<GradedJordan, NilError> {
    GradedJordan::new(&reduced_parts(fibre, t)?.plus, fibre.reduced(), 1)
}

/// `D⁻(t)` chains on the reduced model.
pub fn minus_jordan(fibre: &Fibre, t: &FnVec) -> Result<GradedJordan, NilError> {
    GradedJordan::new(&reduced_parts(fibre, t)?.minus, fibre.reduced(), -1)
}

pub fn graded_jordan_plus(fibre: &Fibre, t: &FnVec) -> Result<(GradedPartition, MultiplicityMatrix), NilError> {
    let m = plus_jordan(fibre, t)?.multiplicities();
    Ok((GradedPartition::from_matrix(&m), m))
}

pub fn graded_jordan_minus(fibre: &Fibre, t: &FnVec) -> Result<MultiplicityMatrix, NilError> {
    Ok(minus_jordan(fibre, t)?.minus_multiplicities())
}

/// Weight slot counts from the `D⁺` chains; shifted weights run over `0..=2ℓ-2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bigrading {
    /// `table[p][n]` is the number of slots at level `p` with shifted weight `n`.
    pub table: Vec<Vec<usize>>,
    /// Total slot count per shifted weight.
    pub weight_dims: Vec<usize>,
}

impl Bigrading {
    /// Every slot at level `p` has shifted weight in `p..=p+ℓ-1`.
    pub fn in_range(&self) -> bool {
        let l = self.table.len();
        self.table
            .iter()
            .enumerate()
            .all(|(p, row)| row.iter().enumerate().all(|(n, &c)| c == 0 || (p <= n && n < p + l)))
    }
}

pub fn bigrading(plus: &GradedJordan) -> Bigrading {
    let l = plus.levels;
    let width = 2 * l - 1;
    let mut table = vec![vec![0; width]; l];
    for c in &plus.chains {
        let q = c.len() - 1;
        for (i, _) in c.vectors.iter().enumerate() {
            let level = c.start_level + i;
            // weight -q + 2i, shifted by ℓ-1
            table[level][l - 1 - q + 2 * i] += 1;
        }
    }
    let weight_dims = (0..width).map(|n| table.iter().map(|row| row[n]).sum()).collect();
    Bigrading { table, weight_dims }
}

/// Vectors of weight `≥ w` for the sl2 grading attached to a graded nilpotent
/// `n`: `Σ_j (im N^j ∩ ker N^{j-w+1})`, computed without choosing chains.
///
/// The result is graded, so it is returned level by level in level coordinates.
pub fn weight_filtration(n: &Mat, offsets: &[usize], step: isize, w: isize) -> Vec<Subspace> {
    let nl = offsets.len() - 1;
    (0..nl)
        .map(|p| {
            let hp = offsets[p + 1] - offsets[p];
            let mut acc = Subspace::zero(hp);
            for j in 0..nl {
                let k = j as isize - w + 1;
                if k <= 0 {
                    continue;
                }
                let src = p as isize - step * j as isize;
                if !(0..nl as isize).contains(&src) {
                    break;
                }
                let im = column_space(&level_power(n, offsets, src as usize, j, step).expect("source is in range"));
                let ker = match level_power(n, offsets, p, k as usize, step) {
                    Some(m) => kernel(&m),
                    None => Subspace::full(hp),
                };
                acc = acc.sum(&im.intersect(&ker).expect("same level")).expect("same level");
            }
            acc
        })
        .collect()
}

/// Comparison of the two weight filtrations of `D⁺(t)` and `D⁻(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightCheck {
    /// `W′_n = (W^{n+1})⊥` for every shifted weight `n`.
    pub orthogonal: bool,
    /// `dim W^n / W^{n+1}` agrees with the chain slot counts.
    pub dims_match: bool,
    /// `(D⁺)^k` induces an isomorphism between graded pieces `ℓ-1-k` and `ℓ-1+k`.
    pub powers_iso: bool,
}

impl WeightCheck {
    pub fn all(&self) -> bool {
        self.orthogonal && self.dims_match && self.powers_iso
    }
}

fn total_dim(levels: &[Subspace]) -> usize {
    levels.iter().map(Subspace::dim).sum()
}

/// Builds `W^n` from `D⁺` and `W′_n` from `D⁻` independently and compares them.
pub fn check_weight_filtrations(fibre: &Fibre, t: &FnVec) -> Result<WeightCheck, NilError> {
    let g = fibre.reduced();
    let parts = reduced_parts(fibre, t)?;
    let offsets = g.offsets();
    let nl = g.levels();
    let l = nl as isize;
    let top = 2 * l - 1;
    let grams: Vec<BilinearForm> =
        (0..nl).map(|p| BilinearForm::new(g.level_gram(p))).collect::<Result<_, _>>()?;
    // upper[n] = W^n, shifted weight >= n
    let upper: Vec<Vec<Subspace>> = (0..=top).map(|n| weight_filtration(&parts.plus, offsets, 1, n - l + 1)).collect();
    let mut orthogonal = true;
    for n in 0..top {
        let lower = weight_filtration(&parts.minus, offsets, -1, l - 1 - n);
        for p in 0..nl {
            orthogonal &= lower[p] == orth_complement(&upper[n as usize + 1][p], &grams[p])?;
        }
    }
    let slots = bigrading(&GradedJordan::new(&parts.plus, g, 1)?).weight_dims;
    let dims_match = (0..top as usize).all(|n| total_dim(&upper[n]) - total_dim(&upper[n + 1]) == slots[n]);
    let mut powers_iso = true;
    for k in 1..nl {
        let (lo, hi) = (nl - 1 - k, nl - 1 + k);
        let mut rank = 0;
        for p in 0..nl {
            let Some(m) = level_power(&parts.plus, offsets, p, k, 1) else { continue };
            let mapped = image(&m, &upper[lo][p])?.sum(&upper[hi + 1][p + k])?;
            powers_iso &= mapped.is_subspace_of(&upper[hi][p + k]);
            rank += mapped.dim() - upper[hi + 1][p + k].dim();
        }
        let src = total_dim(&upper[lo]) - total_dim(&upper[lo + 1]);
        let dst = total_dim(&upper[hi]) - total_dim(&upper[hi + 1]);
        powers_iso &= rank == src && rank == dst;
    }
    Ok(WeightCheck { orthogonal, dims_match, powers_iso })
}

/// One row of the `D⁻` partition on the ambient model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedRow {
    /// First vector of the chain, at its highest level.
    pub head: Vec<Scalar>,
    pub top_level: usize,
    pub length: usize,
    /// Length after erasing the box of degree 0, if the chain reaches it.
    pub truncated: usize,
}

/// Truncation of the `D⁻(t)` partition on all points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub lambda: Partition,
    /// Rows sorted by decreasing truncated length, ties in chain order.
    pub rows: Vec<TruncatedRow>,
    pub truncated: Partition,
    pub erased: usize,
}

impl Truncation {
    pub fn s(&self) -> usize {
        self.lambda.len()
    }

    pub fn s_prime(&self) -> usize {
        self.truncated.len()
    }
}

pub fn truncate(fibre: &Fibre, t: &FnVec) -> Result<Truncation, NilError> {
    if !fibre.panel().contains(t) {
        return Err(ConfigError::NotInPanel.into());
    }
    let g = fibre.ambient();
    let parts = graded_parts(t, g)?;
    let j = GradedJordan::new(&parts.minus, g, -1)?;
    let mut rows: Vec<TruncatedRow> = j
        .chains
        .iter()
        .map(|c| {
            let reaches_zero = c.end_level == 0;
            TruncatedRow {
                head: g.vector_from_graded(c.head()),
                top_level: c.start_level,
                length: c.len(),
                truncated: c.len() - usize::from(reaches_zero),
            }
        })
        .collect();
    rows.sort_by(|a, b| b.truncated.cmp(&a.truncated));
    let erased = rows.iter().map(|r| r.length - r.truncated).sum();
    Ok(Truncation {
        lambda: j.partition(),
        truncated: Partition::new(rows.iter().map(|r| r.truncated).collect()),
        rows,
        erased,
    })
}

/// `Σ_p tr(h_p)` data and the successive differences `a_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopData {
    /// Graded trace of the semisimple element at each level.
    pub traces: Vec<i64>,
    /// `a_p = tr(h_{p+1}) − tr(h_p)` for `p = 0..ℓ-2`.
    pub exponents: Vec<i64>,
}

/// Loop exponents of the `D⁺` chains, with the bound `|a_p| ≤ 2·h^max·ℓ` asserted.
pub fn loop_exponents(plus: &GradedJordan, hilbert: &[usize]) -> Result<LoopData, NilError> {
    let l = plus.levels;
    let mut traces = vec![0i64; l];
    for c in &plus.chains {
        let q = c.len() as i64 - 1;
        for i in 0..c.len() {
            traces[c.start_level + i] += 2 * i as i64 - q;
        }
    }
    let exponents: Vec<i64> = traces.windows(2).map(|w| w[1] - w[0]).collect();
    let hmax = hilbert.iter().copied().max().unwrap_or(0) as i64;
    let bound = 2 * hmax * l as i64;
    if let Some((level, &value)) = exponents.iter().enumerate().find(|(_, a)| a.abs() > bound) {
        return Err(NilError::LoopBound { level, value, bound });
    }
    Ok(LoopData { traces, exponents })
}

/// Multiplicity matrices seen over random panel functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strata {
    pub samples: usize,
    /// Each observed matrix with its number of occurrences.
    pub observed: BTreeMap<MultiplicityMatrix, usize>,
    pub generic: MultiplicityMatrix,
    /// Set when the dominance-maximal partition is not unique or not attained by half the samples.
    pub ambiguous: bool,
    /// Images under the forgetful map, sorted.
    pub partitions: Vec<Partition>,
}

/// Random panel function with integer coordinates in `[-bound, bound]` in the adapted basis.
pub fn random_panel_element(fibre: &Fibre, rng: &mut impl Rng, bound: i64) -> FnVec {
    let coords: Vec<Scalar> = (0..=fibre.panel().r()).map(|_| int(rng.gen_range(-bound..=bound))).collect();
    fibre.panel().element(&coords)
}

pub fn sample_strata(fibre: &Fibre, n_samples: usize, seed: u64) -> Result<Strata, NilError> {
    if n_samples == 0 {
        return Err(NilError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed: BTreeMap<MultiplicityMatrix, usize> = BTreeMap::new();
    for _ in 0..n_samples {
        let t = random_panel_element(fibre, &mut rng, 10);
        let m = plus_jordan(fibre, &t)?.multiplicities();
        *observed.entry(m).or_default() += 1;
    }
    let mut by_partition: BTreeMap<Partition, usize> = BTreeMap::new();
    for (m, c) in &observed {
        *by_partition.entry(m.forget_grading()).or_default() += c;
    }
    let maximal: Vec<&Partition> = by_partition
        .keys()
        .filter(|a| by_partition.keys().all(|b| *b == **a || !b.dominates(a)))
        .collect();
    let top = maximal[0].clone();
    let (generic, count) = observed
        .iter()
        .filter(|(m, _)| m.forget_grading() == top)
        .max_by_key(|(_, &c)| c)
        .map(|(m, &c)| (m.clone(), c))
        .expect("maximal partition is observed");
    let ambiguous = maximal.len() > 1 || 2 * count < n_samples;
    Ok(Strata { samples: n_samples, observed, generic, ambiguous, partitions: by_partition.into_keys().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configmodel::{Configuration, Panel};

    fn chain_fibre(d: usize) -> (Fibre, FnVec) {
        let t: Vec<i64> = (0..d as i64).collect();
        let t = FnVec::from_ints(&t);
        let p = Panel::from_functions(Configuration::unlabeled(d), std::slice::from_ref(&t)).unwrap();
        (Fibre::new(p).unwrap(), t)
    }

    #[test]
    fn chain_panel_graded_partition() {
        let (f, t) = chain_fibre(4);
        let (gp, m) = graded_jordan_plus(&f, &t).unwrap();
        assert_eq!(gp.lambda, Partition::new(vec![3, 1]));
        assert_eq!(gp.per_level, vec![Partition::new(vec![1]), Partition::empty(), Partition::new(vec![3])]);
        assert_eq!((m.get(0, 0), m.get(2, 2)), (1, 1));
        assert_eq!(gp.predicted_hilbert(), vec![2, 1, 1]);
        assert!(m.is_upper_triangular() && gp.fits(f.hilbert()));
        let mm = graded_jordan_minus(&f, &t).unwrap();
        assert_eq!(mm.get(2, 0), 1);
        assert_eq!(mm, m.reflected());
    }

    #[test]
    fn constant_function_has_trivial_jordan_type() {
        let (f, _) = chain_fibre(4);
        let (gp, m) = graded_jordan_plus(&f, &FnVec::ones(4)).unwrap();
        assert_eq!(gp.lambda, Partition::column(4));
        assert_eq!((0..3).map(|p| m.get(0, p)).collect::<Vec<_>>(), vec![2, 1, 1]);
        let lp = loop_exponents(&plus_jordan(&f, &FnVec::ones(4)).unwrap(), f.hilbert()).unwrap();
        assert_eq!(lp.exponents, vec![0, 0]);
        let b = bigrading(&plus_jordan(&f, &FnVec::ones(4)).unwrap());
        assert_eq!(b.weight_dims, vec![0, 0, 4, 0, 0]);
    }

    #[test]
    fn chain_panel_weights_and_loops() {
        let (f, t) = chain_fibre(4);
        let j = plus_jordan(&f, &t).unwrap();
        let b = bigrading(&j);
        assert_eq!(b.weight_dims, vec![1, 0, 2, 0, 1]);
        assert!(b.in_range());
        let lp = loop_exponents(&j, f.hilbert()).unwrap();
        assert_eq!(lp.traces, vec![-2, 0, 2]);
        assert_eq!(lp.exponents, vec![2, 2]);
        assert!(check_weight_filtrations(&f, &t).unwrap().all());
    }

    #[test]
    fn chain_panel_truncation() {
        let (f, t) = chain_fibre(4);
        let tr = truncate(&f, &t).unwrap();
        assert_eq!(tr.lambda, Partition::new(vec![3, 1]));
        assert_eq!(tr.truncated, Partition::new(vec![2]));
        assert_eq!((tr.erased, tr.s_prime()), (2, 1));
        let (f, t) = chain_fibre(5);
        let tr = truncate(&f, &t).unwrap();
        assert_eq!(tr.lambda, Partition::new(vec![4, 1]));
        assert_eq!(tr.truncated, Partition::new(vec![3]));
    }

    #[test]
    fn strata_of_chain_panel() {
        let (f, _) = chain_fibre(4);
        let s = sample_strata(&f, 20, 7).unwrap();
        assert_eq!(s.generic.forget_grading(), Partition::new(vec![3, 1]));
        assert!(!s.ambiguous);
    }

    #[test]
    fn weight_filtration_of_single_block() {
        // e0 -> e1 -> e2 across three one-dimensional levels
        let n = Mat::from_int_rows(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let dims = |w| weight_filtration(&n, &[0, 1, 2, 3], 1, w).iter().map(Subspace::dim).collect::<Vec<_>>();
        assert_eq!(dims(3), vec![0, 0, 0]);
        assert_eq!(dims(2), vec![0, 0, 1]);
        assert_eq!(dims(1), vec![0, 0, 1]);
        assert_eq!(dims(0), vec![0, 1, 1]);
        assert_eq!(dims(-2), vec![1, 1, 1]);
    }
}
