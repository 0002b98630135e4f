//! Multiplication operators split by degree, the Lie algebra they generate,
//! its center and the induced block decomposition of the points, and
//! kernels of the degree-raising parts.

use thiserror::Error;

use crate::configmodel::{ConfigError, FnVec};
use crate::exactlin::{kernel, EchelonBuilder, LinAlgError, Mat, Scalar};
use crate::fibre::Fibre;
use crate::filtration::GradedModel;
use crate::modp::{ModEchelon, ModMat};
use num::{One, Zero};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("function has {found} values but the model has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("multiplication has components of degree other than -1, 0, +1")]
    NotTriangular,
    #[error("center element is not diagonal")]
    CenterNotDiagonal,
    #[error("algebra has dimension {algebra} but the blocks give {blocks}")]
    DimensionIdentity { algebra: usize, blocks: usize },
    #[error("center has dimension {center} but there are {blocks} blocks")]
    CenterBlockCount { center: usize, blocks: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

impl LieError {
    /// True for results contradicting a structural theorem rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            LieError::NotTriangular
                | LieError::CenterNotDiagonal
                | LieError::DimensionIdentity { .. }
                | LieError::CenterBlockCount { .. }
        )
    }
}

/// Multiplication by `t` and its parts of degree -1, 0, +1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularOp {
    pub t: FnVec,
    pub full: Mat,
    pub minus: Mat,
    pub zero: Mat,
    pub plus: Mat,
}

/// Parts of multiplication by `t` of degree -1, 0, +1, in graded coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedParts {
    pub minus: Mat,
    pub zero: Mat,
    pub plus: Mat,
}

impl GradedParts {
    /// Block of the part of degree `target - source`.
    pub fn block(&self, g: &GradedModel, target: usize, source: usize) -> Mat {
        let part = match target as isize - source as isize {
            -1 => &self.minus,
            0 => &self.zero,
            1 => &self.plus,
            _ => return Mat::zeros(g.level_range(target).len(), g.level_range(source).len()),
        };
        part.submatrix(g.level_range(target), g.level_range(source))
    }
}

pub fn graded_parts(t: &FnVec, g: &GradedModel) -> Result<GradedParts, LieError> {
    let n = g.ambient();
    if t.len() != n {
        return Err(LieError::DimensionMismatch { expected: n, found: t.len() });
    }
    let a = g.to_graded(&Mat::diagonal(t.values()));
    let offsets = g.offsets();
    let level_of = |i: usize| offsets.partition_point(|&o| o <= i) - 1;
    let mut parts = [Mat::zeros(n, n), Mat::zeros(n, n), Mat::zeros(n, n)];
    for i in 0..n {
        for j in 0..n {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let k = level_of(i) as isize - level_of(j) as isize;
            if k.abs() > 1 {
                return Err(LieError::NotTriangular);
            }
            parts[(k + 1) as usize].set(i, j, x.clone());
        }
    }
    let [minus, zero, plus] = parts;
    Ok(GradedParts { minus, zero, plus })
}

/// Splits multiplication by `t` along the summands, in the standard basis.
pub fn triangular(t: &FnVec, g: &GradedModel) -> Result<TriangularOp, LieError> {
    let parts = graded_parts(t, g)?;
    let full = Mat::diagonal(t.values());
    let minus = g.from_graded(&parts.minus);
    let plus = g.from_graded(&parts.plus);
    let zero = &(&full - &minus) - &plus;
    Ok(TriangularOp { t: t.clone(), full, minus, zero, plus })
}

/// A Lie subalgebra of `gl_n`, with the generators it was built from.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    n: usize,
    basis: Vec<Mat>,
    generators: Vec<Mat>,
    plus_vanishes: bool,
    full_blocks: Option<Vec<Vec<usize>>>,
}

impl LieAlgebra {
    /// Closure of `generators`, which must be `n × n`.
    pub fn generated_by(n: usize, generators: Vec<Mat>) -> LieAlgebra {
        let plus_vanishes = false;
        match full_block_closure(n, &generators) {
            Some(blocks) => {
                let basis = blocks
                    .iter()
                    .flat_map(|b| b.iter().flat_map(move |&i| b.iter().map(move |&j| (i, j))))
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .map(|(i, j)| {
                        let mut m = Mat::zeros(n, n);
                        m.set(i, j, Scalar::one());
                        m
                    })
                    .collect();
                LieAlgebra { n, basis, generators, plus_vanishes, full_blocks: Some(blocks) }
            }
            None => {
                let (basis, _) = lie_closure(n, &generators);
                LieAlgebra { n, basis, generators, plus_vanishes, full_blocks: None }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Basis in echelon order when the algebra is a sum of full matrix algebras.
    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    /// Whether every degree +1 generator is zero.
    pub fn plus_vanishes(&self) -> bool {
        self.plus_vanishes
    }

    /// Index sets `B` with the algebra equal to `⊕ gl(B)`, when that was certified.
    pub fn full_blocks(&self) -> Option<&[Vec<usize>]> {
        self.full_blocks.as_deref()
    }
}

/// Lie closure of a set of `n × n` matrices by left-normed bracket saturation.
pub fn lie_closure(n: usize, generators: &[Mat]) -> (Vec<Mat>, EchelonBuilder) {
    let mut eb = EchelonBuilder::new(n * n);
    let mut basis = Vec::new();
    let mut frontier = Vec::new();
    for g in generators {
        if eb.insert(g.flat()) {
            basis.push(g.clone());
            frontier.push(g.clone());
        }
    }
    while !frontier.is_empty() && eb.dim() < n * n {
        let mut next = Vec::new();
        'outer: for g in generators {
            for x in &frontier {
                let b = g.commutator(x);
                if eb.insert(b.flat()) {
                    basis.push(b.clone());
                    next.push(b);
                    if eb.dim() == n * n {
                        break 'outer;
                    }
                }
            }
        }
        frontier = next;
    }
    (basis, eb)
}

/// Connected components of the graph joining `i` and `j` whenever some
/// generator has a nonzero `(i, j)` entry. Untouched indices are dropped.
fn support_components(n: usize, generators: &[Mat]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut touched = vec![false; n];
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for g in generators {
        for i in 0..n {
            for j in 0..n {
                if !g.get(i, j).is_zero() {
                    touched[i] = true;
                    touched[j] = true;
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in (0..n).filter(|&i| touched[i]) {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[root_of[r]].push(i);
    }
    comps
}

/// Decides whether the generated algebra is all of `⊕ gl(B)` over the
/// support components `B`.
///
/// The algebra always lies inside that sum. Brackets are saturated modulo a
/// large prime; independence there implies independence over `Q`, so
/// reaching the upper bound certifies equality exactly. Returns `None` when
/// the bound is not reached, leaving the exact closure to decide.
fn full_block_closure(n: usize, generators: &[Mat]) -> Option<Vec<Vec<usize>>> {
    let comps = support_components(n, generators);
    let bound: usize = comps.iter().map(|c| c.len() * c.len()).sum();
    let gens: Vec<ModMat> = generators.iter().map(ModMat::from_mat).collect::<Option<_>>()?;
    let mut eb = ModEchelon::new();
    let mut frontier: Vec<ModMat> = gens.iter().filter(|g| eb.insert(g.flat())).cloned().collect();
    while !frontier.is_empty() && eb.dim() < bound {
        let mut next = Vec::new();
        'outer: for g in &gens {
            for x in &frontier {
                let b = g.commutator(x);
                if eb.insert(b.flat()) {
                    next.push(b);
                    if eb.dim() == bound {
                        break 'outer;
                    }
                }
            }
        }
        frontier = next;
    }
    (eb.dim() == bound).then_some(comps)
}

/// The algebra generated by `D⁻(t), D⁰(t), D⁺(t)` for a basis `t` of the
/// panel, acting on functions on the reduced points.
pub fn generate_lie_algebra(fibre: &Fibre) -> Result<LieAlgebra, LieError> {
    let g = fibre.reduced();
    let n = g.ambient();
    let mut generators = Vec::new();
    let mut plus_vanishes = true;
    for t in fibre.reduced_panel_basis() {
        let op = triangular(&t, g)?;
        plus_vanishes &= op.plus.is_zero();
        for m in [op.minus, op.zero, op.plus] {
            if !m.is_zero() {
                generators.push(m);
            }
        }
    }
    let mut alg = LieAlgebra::generated_by(n, generators);
    alg.plus_vanishes = plus_vanishes;
    Ok(alg)
}

/// Center, weight blocks, and the resulting decomposition of the points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieReport {
    pub algebra_dim: usize,
    pub center_dim: usize,
    /// Point indices of each block, ordered by least index.
    pub blocks: Vec<Vec<usize>>,
    /// Dimension of the weight space of each block (number of reduced classes).
    pub weight_dims: Vec<usize>,
    pub plus_vanishes: bool,
}

/// Center as the null space of the stacked adjoint-action system, then the
/// joint level sets of the center's diagonals.
pub fn center_and_blocks(alg: &LieAlgebra, fibre: &Fibre) -> Result<LieReport, LieError> {
    let center = center_basis(alg)?;
    let n = alg.n();
    if center.iter().any(|c| !c.is_diagonal()) {
        return Err(LieError::CenterNotDiagonal);
    }
    let mut class_blocks: Vec<Vec<usize>> = Vec::new();
    let mut signatures: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..n {
        let sig: Vec<Scalar> = center.iter().map(|c| c.get(i, i).clone()).collect();
        match signatures.iter().position(|s| *s == sig) {
            Some(b) => class_blocks[b].push(i),
            None => {
                signatures.push(sig);
                class_blocks.push(vec![i]);
            }
        }
    }
    let red = fibre.reduction();
    let mut blocks: Vec<Vec<usize>> = class_blocks
        .iter()
        .map(|cb| {
            let mut pts: Vec<usize> = cb.iter().flat_map(|&c| red.blocks()[c].iter().copied()).collect();
            pts.sort_unstable();
            pts
        })
        .collect();
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&b| blocks[b][0]);
    let weight_dims: Vec<usize> = order.iter().map(|&b| class_blocks[b].len()).collect();
    blocks = order.iter().map(|&b| blocks[b].clone()).collect();
    if center.len() != blocks.len() {
        return Err(LieError::CenterBlockCount { center: center.len(), blocks: blocks.len() });
    }
    let expected: usize = weight_dims.iter().map(|v| v * v).sum();
    if expected != alg.dim() {
        return Err(LieError::DimensionIdentity { algebra: alg.dim(), blocks: expected });
    }
    Ok(LieReport {
        algebra_dim: alg.dim(),
        center_dim: center.len(),
        blocks,
        weight_dims,
        plus_vanishes: alg.plus_vanishes,
    })
}

/// Basis of `{x ∈ G : [x, s] = 0 for every generator s}`.
///
/// The constraints are applied one generator at a time, each time solving
/// only inside the current solution space.
pub fn center_basis(alg: &LieAlgebra) -> Result<Vec<Mat>, LieError> {
    if let Some(blocks) = alg.full_blocks() {
        // The center of a sum of full matrix algebras is the block scalars.
        let mut blocks = blocks.to_vec();
        blocks.sort_by_key(|b| b[0]);
        return Ok(blocks
            .iter()
            .map(|b| {
                let mut m = Mat::zeros(alg.n, alg.n);
                for &i in b {
                    m.set(i, i, Scalar::one());
                }
                m
            })
            .collect());
    }
    let mut current: Vec<Mat> = alg.basis.clone();
    for s in &alg.generators {
        if current.is_empty() {
            break;
        }
        let cols: Vec<Vec<Scalar>> = current.iter().map(|c| c.commutator(s).flat().to_vec()).collect();
        let m = Mat::from_columns(alg.n * alg.n, &cols)?;
        let k = kernel(&m);
        current = k
            .vectors()
            .iter()
            .map(|coef| {
                coef.iter()
                    .zip(&current)
                    .filter(|(c, _)| !c.is_zero())
                    .fold(Mat::zeros(alg.n, alg.n), |acc, (c, b)| &acc + &b.scale(c))
            })
            .collect();
    }
    Ok(current)
}

/// Quasi-abelian, simple, or mixed with blocks split by weight-space dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    QuasiAbelian,
    Simple,
    /// Indices of blocks with one-dimensional and with larger weight spaces.
    Mixed { singular: Vec<usize>, multiple: Vec<usize> },
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::QuasiAbelian => "quasi_abelian",
            Classification::Simple => "simple",
            Classification::Mixed { .. } => "mixed",
        }
    }
}

pub fn classify(report: &LieReport) -> Classification {
    if report.plus_vanishes {
        Classification::QuasiAbelian
    } else if report.center_dim == 1 {
        Classification::Simple
    } else {
        let (singular, multiple) = (0..report.weight_dims.len()).partition(|&b| report.weight_dims[b] == 1);
        Classification::Mixed { singular, multiple }
    }
}

/// Kernel dimensions of the degree +1 parts restricted to each summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorelliReport {
    /// `dim ker d⁺_p` modulo constants, for each checked `p`.
    pub kernel_dims: Vec<usize>,
    /// Smallest `p` with a nonzero kernel; `None` when all vanish.
    pub index: Option<usize>,
    /// Dimension of the common kernel modulo constants.
    pub total_kernel_dim: usize,
    /// Dimension modulo constants of the panel functions with vanishing degree -1 part.
    pub minus_kernel_dim: usize,
    /// Whether the two total kernels coincide.
    pub kernels_agree: bool,
}

impl TorelliReport {
    pub fn is_strong(&self) -> bool {
        self.index.is_none()
    }

    pub fn is_nested(&self) -> bool {
        self.kernel_dims.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Subspace of panel coordinates `c` with `Σ cᵢ Bᵢ = 0` for every listed
/// block `Bᵢ` of each part.
fn panel_kernel(blocks: &[Vec<Mat>]) -> Result<crate::exactlin::Subspace, LieError> {
    let cols: Vec<Vec<Scalar>> =
        blocks.iter().map(|bs| bs.iter().flat_map(|b| b.flat().iter().cloned()).collect()).collect();
    let rows = cols.first().map_or(0, Vec::len);
    if rows == 0 {
        return Ok(crate::exactlin::Subspace::full(blocks.len()));
    }
    Ok(kernel(&Mat::from_columns(rows, &cols)?))
}

/// Kernels of `t ↦ D⁺(t)|_{Hᵖ}` on the ambient model for `p ≤ max(ℓ-2, 0)`.
pub fn torelli_index(fibre: &Fibre) -> Result<TorelliReport, LieError> {
    let g = fibre.ambient();
    let basis = fibre.panel().adapted_basis();
    let parts: Vec<GradedParts> = basis.iter().map(|t| graded_parts(t, g)).collect::<Result<_, _>>()?;
    let l = fibre.length();
    let plus_blocks = |ps: &[usize]| -> Vec<Vec<Mat>> {
        parts.iter().map(|pt| ps.iter().map(|&p| pt.block(g, p + 1, p)).collect()).collect()
    };
    let last = l.saturating_sub(2);
    let mut kernel_dims = Vec::new();
    for p in 0..=last {
        kernel_dims.push(panel_kernel(&plus_blocks(&[p]))?.dim() - 1);
    }
    let below: Vec<usize> = (0..l).collect();
    let total_plus = panel_kernel(&plus_blocks(&below))?;
    let minus_blocks: Vec<Vec<Mat>> =
        parts.iter().map(|pt| (1..l).map(|p| pt.block(g, p - 1, p)).collect()).collect();
    let total_minus = panel_kernel(&minus_blocks)?;
    let index = kernel_dims.iter().position(|&k| k > 0);
    Ok(TorelliReport {
        kernel_dims,
        index,
        total_kernel_dim: total_plus.dim() - 1,
        minus_kernel_dim: total_minus.dim() - 1,
        kernels_agree: total_plus == total_minus,
    })
}
