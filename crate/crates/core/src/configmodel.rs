//! Configurations of labeled points, functions on them, and panels.
//!
//! Functions on a configuration of `d` points are vectors in `Q^d` in the
//! delta-function basis, with pointwise multiplication. A panel is a
//! subspace of functions of dimension at least two containing the constants.

use std::collections::HashSet;

use num::{One, Zero};
use thiserror::Error;

use crate::exactlin::{BilinearForm, EchelonBuilder, LinAlgError, Mat, Scalar, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("points {0:?} and {1:?} have equal coordinates")]
    DuplicatePoint(String, String),
    #[error("coordinate vectors have unequal lengths")]
    RaggedCoordinates,
    #[error("configuration has no points")]
    Empty,
    #[error("function has {found} values but the configuration has {expected} points")]
    ConfigMismatch { expected: usize, found: usize },
    #[error("panel does not contain the constant functions")]
    MissingConstants,
    #[error("panel has dimension {0}; at least 2 is required")]
    PanelTooSmall(usize),
    #[error("designated section vanishes at point {0:?}")]
    SigmaVanishes(String),
    #[error("section row index {0} is out of range")]
    NoSuchSection(usize),
    #[error("rescaling unit 1+s vanishes at point {0:?}")]
    UnitVanishes(String),
    #[error("function is not an element of the panel")]
    NotInPanel,
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// `d` distinct labeled points, optionally with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    labels: Vec<String>,
    coords: Option<Vec<Vec<Scalar>>>,
}

impl Configuration {
    pub fn new(labels: Vec<String>, coords: Option<Vec<Vec<Scalar>>>) -> Result<Self, ConfigError> {
        if labels.is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(ConfigError::DuplicateLabel(l.clone()));
            }
        }
        if let Some(cs) = &coords {
            if cs.len() != labels.len() {
                return Err(ConfigError::ConfigMismatch { expected: labels.len(), found: cs.len() });
            }
            if cs.iter().any(|c| c.len() != cs[0].len()) {
                return Err(ConfigError::RaggedCoordinates);
            }
            for i in 0..cs.len() {
                for j in 0..i {
                    if cs[i] == cs[j] {
                        return Err(ConfigError::DuplicatePoint(labels[j].clone(), labels[i].clone()));
                    }
                }
            }
        }
        Ok(Configuration { labels, coords })
    }

    /// Points labelled `z1, ..., zd` without coordinates.
    pub fn unlabeled(d: usize) -> Self {
        Configuration::new((1..=d).map(|i| format!("z{i}")).collect(), None).unwrap()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn coords(&self) -> Option<&[Vec<Scalar>]> {
        self.coords.as_deref()
    }
}

/// A function on the points, in the delta basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FnVec(Vec<Scalar>);

impl FnVec {
    pub fn new(values: Vec<Scalar>) -> Self {
        FnVec(values)
    }

    pub fn from_ints(values: &[i64]) -> Self {
        FnVec(crate::exactlin::ints(values))
    }

    pub fn ones(d: usize) -> Self {
        FnVec(vec![Scalar::one(); d])
    }

    pub fn zeros(d: usize) -> Self {
        FnVec(vec![Scalar::zero(); d])
    }

    pub fn delta(d: usize, i: usize) -> Self {
        let mut v = vec![Scalar::zero(); d];
        v[i] = Scalar::one();
        FnVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// `Σ_z f(z)`.
    pub fn trace(&self) -> Scalar {
        self.0.iter().fold(Scalar::zero(), |a, b| a + b)
    }

    /// Pointwise product.
    pub fn mult(&self, other: &FnVec) -> Result<FnVec, ConfigError> {
        if self.len() != other.len() {
            return Err(ConfigError::ConfigMismatch { expected: self.len(), found: other.len() });
        }
        Ok(FnVec(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect()))
    }

    pub fn pow(&self, k: usize) -> FnVec {
        FnVec(self.0.iter().map(|x| num::pow(x.clone(), k)).collect())
    }

    pub fn add(&self, other: &FnVec) -> FnVec {
        FnVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> FnVec {
        FnVec(self.0.iter().map(|a| a * c).collect())
    }
}

/// Trace of a function.
pub fn trace(f: &FnVec) -> Scalar {
    f.trace()
}

/// Pointwise product of two functions.
pub fn mult(f: &FnVec, g: &FnVec) -> Result<FnVec, ConfigError> {
    f.mult(g)
}

/// The trace form `q(f, g) = Σ f(z) g(z)`; identity Gram matrix in the delta basis.
pub fn trace_form(d: usize) -> BilinearForm {
    BilinearForm::standard(d)
}

/// Span of all pointwise products `a b` with `a ∈ s`, `b ∈ t`.
pub fn product_span(s: &Subspace, t: &Subspace) -> Subspace {
    let mut eb = EchelonBuilder::new(s.ambient());
    for a in s.vectors() {
        for b in t.vectors() {
            let prod: Vec<Scalar> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            eb.insert(&prod);
        }
    }
    eb.to_subspace()
}

/// A subspace of functions containing the constants, of dimension `r + 1 ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Panel {
    config: Configuration,
    space: Subspace,
}

impl Panel {
    pub fn new(config: Configuration, space: Subspace) -> Result<Self, ConfigError> {
        let d = config.len();
        if space.ambient() != d {
            return Err(ConfigError::ConfigMismatch { expected: d, found: space.ambient() });
        }
        if !space.contains(FnVec::ones(d).values()) {
            return Err(ConfigError::MissingConstants);
        }
        if space.dim() < 2 {
            return Err(ConfigError::PanelTooSmall(space.dim()));
        }
        Ok(Panel { config, space })
    }

    /// Panel spanned by the given functions together with the constants.
    pub fn from_functions(config: Configuration, fns: &[FnVec]) -> Result<Self, ConfigError> {
        let d = config.len();
        let mut rows = vec![FnVec::ones(d).into_values()];
        for f in fns {
            if f.len() != d {
                return Err(ConfigError::ConfigMismatch { expected: d, found: f.len() });
            }
            rows.push(f.values().to_vec());
        }
        let space = Subspace::from_rows(d, &rows)?;
        Panel::new(config, space)
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn d(&self) -> usize {
        self.config.len()
    }

    /// `r = dim - 1`.
    pub fn r(&self) -> usize {
        self.space.dim() - 1
    }

    pub fn contains(&self, f: &FnVec) -> bool {
        self.space.contains(f.values())
    }

    /// Basis starting with `1_Z`, followed by the RREF basis of the panel
    /// functions vanishing at the first point.
    pub fn adapted_basis(&self) -> Vec<FnVec> {
        let d = self.d();
        let mut first = vec![Scalar::zero(); d];
        first[0] = Scalar::one();
        let eval = Mat::from_rows(d, &[first]).unwrap();
        let vanishing = self.space.intersect(&crate::exactlin::kernel(&eval)).unwrap();
        let mut out = vec![FnVec::ones(d)];
        out.extend(vanishing.vectors().into_iter().map(FnVec::new));
        out
    }

    /// Panel function with the given coordinates in the adapted basis.
    pub fn element(&self, coords: &[Scalar]) -> FnVec {
        let basis = self.adapted_basis();
        assert_eq!(coords.len(), basis.len(), "panel element: coordinate count mismatch");
        let mut acc = FnVec::zeros(self.d());
        for (c, b) in coords.iter().zip(&basis) {
            acc = acc.add(&b.scale(c));
        }
        acc
    }
}

/// Panel spanned by section values divided pointwise by the designated row.
pub fn panel_from_pencil(
    config: Configuration,
    sections: &Mat,
    sigma_row: usize,
) -> Result<Panel, ConfigError> {
    let d = config.len();
    if sections.cols() != d {
        return Err(ConfigError::ConfigMismatch { expected: d, found: sections.cols() });
    }
    if sigma_row >= sections.rows() {
        return Err(ConfigError::NoSuchSection(sigma_row));
    }
    let sigma = sections.row(sigma_row);
    if let Some(z) = sigma.iter().position(Zero::is_zero) {
        return Err(ConfigError::SigmaVanishes(config.label(z).to_string()));
    }
    let rows: Vec<Vec<Scalar>> = (0..sections.rows())
        .map(|j| sections.row(j).iter().zip(sigma).map(|(x, s)| x / s).collect())
        .collect();
    let space = Subspace::from_rows(d, &rows)?;
    Panel::new(config, space)
}

/// The panel `{h / (1 + s) : h ∈ p}` for `s ∈ p`.
pub fn rescale_panel(p: &Panel, s: &FnVec) -> Result<Panel, ConfigError> {
    if s.len() != p.d() {
        return Err(ConfigError::ConfigMismatch { expected: p.d(), found: s.len() });
    }
    if !p.contains(s) {
        return Err(ConfigError::NotInPanel);
    }
    let unit = unit_of(p, s)?;
    let rows: Vec<Vec<Scalar>> = p
        .space()
        .vectors()
        .into_iter()
        .map(|h| h.iter().zip(unit.values()).map(|(a, u)| a / u).collect())
        .collect();
    let space = Subspace::from_rows(p.d(), &rows)?;
    Panel::new(p.config().clone(), space)
}

/// `1 + s`, checked to be nowhere zero.
pub fn unit_of(p: &Panel, s: &FnVec) -> Result<FnVec, ConfigError> {
    let unit = FnVec::ones(p.d()).add(s);
    if let Some(z) = unit.values().iter().position(Zero::is_zero) {
        return Err(ConfigError::UnitVanishes(p.config().label(z).to_string()));
    }
    Ok(unit)
}

/// The element `s'` of the rescaled panel whose rescaling undoes `s`:
/// `1 + s' = (1 + s)^{-1}`, which lies in `(1+s)^{-1} p`.
pub fn inverse_rescaling(p: &Panel, s: &FnVec) -> Result<FnVec, ConfigError> {
    let unit = unit_of(p, s)?;
    Ok(FnVec::new(unit.values().iter().map(|u| u.recip() - Scalar::one()).collect()))
}

/// Projective coordinates `(b_0(z) : ... : b_r(z))` of each point in the adapted basis.
pub fn kappa_embed(p: &Panel) -> Vec<Vec<Scalar>> {
    let basis = p.adapted_basis();
    (0..p.d())
        .map(|z| basis.iter().map(|b| b.values()[z].clone()).collect())
        .collect()
}
