//! The multiplicative filtration of a panel, the reduction to the points it
//! separates, and the orthogonal decomposition into graded summands.

use num::{One, Zero};
use thiserror::Error;

use crate::configmodel::{product_span, rescale_panel, trace_form, unit_of, ConfigError, FnVec, Panel};
use crate::exactlin::{orth_complement, primitive, BilinearForm, LinAlgError, Mat, Scalar, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("form is degenerate on filtration step {0}")]
    DegenerateRestriction(usize),
    #[error("form is degenerate on the full space of functions")]
    DegenerateAmbient,
    #[error("stable step has dimension {dim} but separates {blocks} classes of points")]
    NotSubalgebra { dim: usize, blocks: usize },
    #[error("summands do not decompose the space: dimensions sum to {found}, expected {expected}")]
    NotDirect { expected: usize, found: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Steps `H̃₋₁ ⊂ ... ⊂ H̃₋ℓ`, with the Hilbert vector `(h⁰, ..., h^ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    steps: Vec<Subspace>,
    hilbert: Vec<usize>,
}

impl Filtration {
    /// `ℓ`, the index at which the filtration stabilizes.
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    /// `H̃₋ᵢ` for `i ≥ 1`; constant from `i = ℓ` on.
    pub fn step(&self, i: usize) -> &Subspace {
        assert!(i >= 1, "filtration steps are indexed from 1");
        &self.steps[(i - 1).min(self.steps.len() - 1)]
    }

    pub fn steps(&self) -> &[Subspace] {
        &self.steps
    }

    pub fn stable(&self) -> &Subspace {
        self.steps.last().unwrap()
    }

    pub fn hilbert(&self) -> &[usize] {
        &self.hilbert
    }

    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(Subspace::dim).collect()
    }
}

/// `H̃₋₁ = H̃`, `H̃₋₍ᵢ₊₁₎ = H̃₋ᵢ + H̃·H̃₋ᵢ`, until the dimension stops growing.
pub fn compute_filtration(p: &Panel) -> Filtration {
    let base = p.space().clone();
    let mut steps = vec![base.clone()];
    loop {
        let last = steps.last().unwrap();
        let next = last.sum(&product_span(&base, last)).unwrap();
        if next.dim() == last.dim() {
            break;
        }
        steps.push(next);
    }
    let mut hilbert = vec![steps[0].dim()];
    for w in steps.windows(2) {
        hilbert.push(w[1].dim() - w[0].dim());
    }
    hilbert.push(p.d() - steps.last().unwrap().dim());
    Filtration { steps, hilbert }
}

/// Classes of points not separated by the stable step, ordered by least point index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    blocks: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Reduction {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn d_prime(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the class containing point `z`.
    pub fn class_of(&self, z: usize) -> usize {
        self.class_of[z]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Values on classes of a function constant on each class.
    pub fn restrict(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let out: Vec<Scalar> = self.blocks.iter().map(|b| v[b[0]].clone()).collect();
        (0..v.len()).all(|z| v[z] == out[self.class_of[z]]).then_some(out)
    }

    /// Pulls a function on classes back to the points.
    pub fn expand(&self, w: &[Scalar]) -> Vec<Scalar> {
        self.class_of.iter().map(|&c| w[c].clone()).collect()
    }

    /// Indicator of class `c` as a function on the points.
    pub fn indicator(&self, c: usize) -> Vec<Scalar> {
        self.class_of
            .iter()
            .map(|&k| if k == c { Scalar::one() } else { Scalar::zero() })
            .collect()
    }
}

/// Level sets of the joint evaluation of a basis of the stable step.
pub fn reduce(p: &Panel, f: &Filtration) -> Result<Reduction, FiltrationError> {
    let stable = f.stable();
    let basis = stable.vectors();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut signatures: Vec<Vec<Scalar>> = Vec::new();
    let mut class_of = Vec::with_capacity(p.d());
    for z in 0..p.d() {
        let sig: Vec<Scalar> = basis.iter().map(|b| b[z].clone()).collect();
        match signatures.iter().position(|s| *s == sig) {
            Some(c) => {
                blocks[c].push(z);
                class_of.push(c);
            }
            None => {
                class_of.push(blocks.len());
                blocks.push(vec![z]);
                signatures.push(sig);
            }
        }
    }
    if blocks.len() != stable.dim() {
        return Err(FiltrationError::NotSubalgebra { dim: stable.dim(), blocks: blocks.len() });
    }
    Ok(Reduction { blocks, class_of })
}

/// A direct sum decomposition `Q^n = ⊕ Hᵖ` into summands that are pairwise
/// orthogonal for a form, with the projections onto each summand.
///
/// Graded coordinates refer to the basis formed by the primitive integer
/// multiples of the RREF rows of `H⁰`, then `H¹`, and so on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModel {
    summands: Vec<Subspace>,
    form: BilinearForm,
    projectors: Vec<Mat>,
    basis: Mat,
    basis_inv: Mat,
    offsets: Vec<usize>,
}

impl GradedModel {
    pub fn new(summands: Vec<Subspace>, form: BilinearForm) -> Result<Self, FiltrationError> {
        let n = form.dim();
        let total: usize = summands.iter().map(Subspace::dim).sum();
        if total != n {
            return Err(FiltrationError::NotDirect { expected: n, found: total });
        }
        let mut cols = Vec::with_capacity(n);
        let mut owner = Vec::with_capacity(n);
        let mut offsets = vec![0];
        for (p, s) in summands.iter().enumerate() {
            for v in s.vectors() {
                cols.push(primitive(&v));
                owner.push(p);
            }
            offsets.push(cols.len());
        }
        let c = Mat::from_columns(n, &cols)?;
        let c_inv = c.inverse().map_err(|_| FiltrationError::NotDirect { expected: n, found: c.rank() })?;
        let projectors = (0..summands.len())
            .map(|p| {
                let sel: Vec<Scalar> = owner
                    .iter()
                    .map(|&o| if o == p { Scalar::one() } else { Scalar::zero() })
                    .collect();
                &(&c * &Mat::diagonal(&sel)) * &c_inv
            })
            .collect();
        Ok(GradedModel { summands, form, projectors, basis: c, basis_inv: c_inv, offsets })
    }

    /// Start of each level in graded coordinates, followed by the total dimension.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn level_range(&self, p: usize) -> std::ops::Range<usize> {
        self.offsets[p]..self.offsets[p + 1]
    }

    /// Columns are the graded basis vectors.
    pub fn basis_matrix(&self) -> &Mat {
        &self.basis
    }

    /// Matrix of an operator in graded coordinates.
    pub fn to_graded(&self, m: &Mat) -> Mat {
        &(&self.basis_inv * m) * &self.basis
    }

    /// Matrix in the standard basis of an operator given in graded coordinates.
    pub fn from_graded(&self, m: &Mat) -> Mat {
        &(&self.basis * m) * &self.basis_inv
    }

    pub fn vector_from_graded(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.basis.apply(x)
    }

    pub fn vector_to_graded(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.basis_inv.apply(v)
    }

    /// Gram matrix of the form on `Hᵖ` in graded coordinates.
    pub fn level_gram(&self, p: usize) -> Mat {
        let cp = self.basis.submatrix(0..self.ambient(), self.level_range(p));
        &(&cp.transpose() * self.form.gram()) * &cp
    }

    /// Number of summands.
    pub fn levels(&self) -> usize {
        self.summands.len()
    }

    pub fn ambient(&self) -> usize {
        self.form.dim()
    }

    pub fn summands(&self) -> &[Subspace] {
        &self.summands
    }

    pub fn summand(&self, p: usize) -> &Subspace {
        &self.summands[p]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.summands.iter().map(Subspace::dim).collect()
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    /// Projection onto `Hᵖ` along the other summands.
    pub fn projector(&self, p: usize) -> &Mat {
        &self.projectors[p]
    }

    /// `⊕_{q ≥ i} H^q`.
    pub fn f_filtration(&self, i: usize) -> Subspace {
        self.summands[i.min(self.levels())..]
            .iter()
            .fold(Subspace::zero(self.ambient()), |acc, s| acc.sum(s).unwrap())
    }

    /// `⊕_{q < i} H^q`.
    pub fn lower_sum(&self, i: usize) -> Subspace {
        self.summands[..i.min(self.levels())]
            .iter()
            .fold(Subspace::zero(self.ambient()), |acc, s| acc.sum(s).unwrap())
    }

    /// Components of `v` in each summand.
    pub fn components(&self, v: &[Scalar]) -> Vec<Vec<Scalar>> {
        self.projectors.iter().map(|pr| pr.apply(v)).collect()
    }
}

/// Orthogonal decomposition with respect to the trace form.
pub fn orthogonal_decomposition(p: &Panel, f: &Filtration) -> Result<GradedModel, FiltrationError> {
    orthogonal_decomposition_with(f, &trace_form(p.d()))
}

/// `H⁰ = H̃`, `Hᵖ = H̃₋₍ₚ₊₁₎ ∩ (H̃₋ₚ)^⊥`, `H^ℓ = (H̃₋ℓ)^⊥` for an arbitrary form.
///
/// Fails at the first filtration step on which the form is degenerate.
pub fn orthogonal_decomposition_with(
    f: &Filtration,
    q: &BilinearForm,
) -> Result<GradedModel, FiltrationError> {
    for (i, s) in f.steps().iter().enumerate() {
        if !q.is_nondegenerate_on(s) {
            return Err(FiltrationError::DegenerateRestriction(i + 1));
        }
    }
    if q.gram().rank() != q.dim() {
        return Err(FiltrationError::DegenerateAmbient);
    }
    let mut summands = vec![f.step(1).clone()];
    for i in 1..f.length() {
        let perp = orth_complement(f.step(i), q)?;
        summands.push(f.step(i + 1).intersect(&perp)?);
    }
    summands.push(orth_complement(f.stable(), q)?);
    GradedModel::new(summands, q.clone())
}

/// Checks `H̃₋ᵢ(rescaled) = (1+s)^{-i} H̃₋ᵢ` together with invariance of the stable step.
pub fn rescaling_law_check(p: &Panel, s: &FnVec, i: usize) -> Result<bool, FiltrationError> {
    let rescaled = rescale_panel(p, s)?;
    let unit = unit_of(p, s)?;
    let f = compute_filtration(p);
    let g = compute_filtration(&rescaled);
    let factor: Vec<Scalar> = unit.pow(i).values().iter().map(|u| u.recip()).collect();
    let moved: Vec<Vec<Scalar>> = f
        .step(i)
        .vectors()
        .into_iter()
        .map(|v| v.iter().zip(&factor).map(|(a, b)| a * b).collect())
        .collect();
    let moved = Subspace::from_rows(p.d(), &moved)?;
    Ok(g.step(i) == &moved && g.stable() == f.stable() && g.length() == f.length())
}

/// The graded model transported to functions on the classes of a reduction,
/// with the restricted form `diag(block sizes)`; its levels are `H⁰..H^{ℓ-1}`.
pub fn reduced_model(
    ambient: &GradedModel,
    f: &Filtration,
    red: &Reduction,
) -> Result<GradedModel, FiltrationError> {
    let b = Mat::from_columns(
        ambient.ambient(),
        &(0..red.d_prime()).map(|c| red.indicator(c)).collect::<Vec<_>>(),
    )?;
    let gram = &(&b.transpose() * ambient.form().gram()) * &b;
    let mut summands = Vec::with_capacity(f.length());
    for p in 0..f.length() {
        let rows: Vec<Vec<Scalar>> = ambient
            .summand(p)
            .vectors()
            .iter()
            .map(|v| red.restrict(v).expect("summands below the stable step are class-constant"))
            .collect();
        summands.push(Subspace::from_rows(red.d_prime(), &rows)?);
    }
    GradedModel::new(summands, BilinearForm::new(gram)?)
}
