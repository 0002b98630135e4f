//! sl2-adapted bases of the functions on the reduced configuration and the
//! polynomial equations built from them: monomial relations, relations from
//! chain ends, rank-4 quadrics, the μ₀₀ split, adjoint coordinates and scroll
//! minors. Every equation set carries its exact evaluation at every point.

use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configmodel::{ConfigError, FnVec, Panel};
use crate::exactlin::{kernel, primitive, solve, EchelonBuilder, LinAlgError, Mat, Scalar, Subspace};
use crate::fibre::Fibre;
use crate::instance::{parse_rats, rats_to_strings, InstanceError};
use crate::liealg::{graded_parts, triangular, LieError};
use crate::nilorbit::{plus_jordan, random_panel_element, truncate, NilError};
use crate::partition::Partition;
use crate::poly::{monomials_of_degree, Exps, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EqError {
    #[error("t is constant on the reduced configuration")]
    ConstantFunction,
    #[error("configuration is not in general position: {0}")]
    NotGeneralPosition(String),
    #[error("D⁺(x_{0}) restricted to the trace-zero panel functions is not an isomorphism onto H¹")]
    HypothesisDHFails(usize),
    #[error("chosen points do not span a hyperplane")]
    NotGeneralEnough,
    #[error("no chains of length {} ending at level {p}", q + 1)]
    EmptyMultiplicity { q: usize, p: usize },
    #[error("sl2 basis is not adapted to the filtration at step {0}")]
    NotAdapted(usize),
    #[error("{0} lies outside the span it must lie in")]
    OutsideSpan(&'static str),
    #[error("emitted polynomial {poly} is nonzero at point {point}")]
    NonVanishing { poly: usize, point: usize },
    #[error(transparent)]
    Nil(#[from] NilError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

impl EqError {
    pub fn is_invariant_violation(&self) -> bool {
        match self {
            EqError::NotAdapted(_) | EqError::OutsideSpan(_) | EqError::NonVanishing { .. } => true,
            EqError::Nil(e) => e.is_invariant_violation(),
            EqError::Lie(e) => e.is_invariant_violation(),
            _ => false,
        }
    }
}

fn pointwise(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn is_constant(v: &[Scalar]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Polynomials in named coordinates with the coordinate values at every
/// point and the evaluation of every polynomial there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSet {
    pub kind: String,
    pub variables: Vec<String>,
    pub polys: Vec<Poly>,
    pub labels: Vec<String>,
    /// `coordinates[z][k]` is the value of variable `k` at point `z`.
    pub coordinates: Vec<Vec<Scalar>>,
    /// `certificate[i][z]` is poly `i` evaluated at point `z`.
    pub certificate: Vec<Vec<Scalar>>,
    /// Whether every coordinate is a panel function.
    pub panel_coordinates: bool,
    pub notes: Vec<String>,
}

impl EquationSet {
    pub fn new(
        kind: &str,
        variables: Vec<String>,
        polys: Vec<Poly>,
        labels: Vec<String>,
        coordinates: Vec<Vec<Scalar>>,
        panel_coordinates: bool,
    ) -> Self {
        let certificate = polys.iter().map(|p| coordinates.iter().map(|x| p.eval(x)).collect()).collect();
        EquationSet {
            kind: kind.to_string(),
            variables,
            polys,
            labels,
            coordinates,
            certificate,
            panel_coordinates,
            notes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// First `(poly, point)` with a nonzero value, if any.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.certificate
            .iter()
            .enumerate()
            .find_map(|(i, row)| row.iter().position(|v| !v.is_zero()).map(|z| (i, z)))
    }

    pub fn all_vanish(&self) -> bool {
        self.first_nonzero().is_none()
    }

    fn checked(self) -> Result<Self, EqError> {
        match self.first_nonzero() {
            Some((poly, point)) => Err(EqError::NonVanishing { poly, point }),
            None => Ok(self),
        }
    }

    /// Dimension of the span of the polynomials.
    pub fn rank(&self) -> usize {
        polynomial_rank(&self.polys)
    }
}

/// Rank of the coefficient vectors of a list of polynomials.
pub fn polynomial_rank(polys: &[Poly]) -> usize {
    let mut monos: Vec<&Exps> = polys.iter().flat_map(|p| p.terms().keys()).collect();
    monos.sort();
    monos.dedup();
    let mut eb = EchelonBuilder::new(monos.len());
    for p in polys {
        let row: Vec<Scalar> = monos.iter().map(|e| p.coefficient(e)).collect();
        eb.insert(&row);
    }
    eb.dim()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermRecord {
    pub coef: String,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyRecord {
    pub vars: Vec<String>,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointValues {
    pub label: String,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EquationSetRecord {
    pub schema: String,
    pub kind: String,
    pub vars: Vec<String>,
    pub polys: Vec<PolyRecord>,
    pub points: Vec<PointValues>,
    pub certificate: Vec<Vec<String>>,
    pub panel_coordinates: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EquationSet {
    pub fn to_record(&self) -> EquationSetRecord {
        EquationSetRecord {
            schema: "1".into(),
            kind: self.kind.clone(),
            vars: self.variables.clone(),
            polys: self
                .polys
                .iter()
                .map(|p| PolyRecord {
                    vars: self.variables.clone(),
                    terms: p
                        .terms()
                        .iter()
                        .map(|(e, c)| TermRecord { coef: c.to_string(), exps: e.clone() })
                        .collect(),
                })
                .collect(),
            points: self
                .labels
                .iter()
                .zip(&self.coordinates)
                .map(|(l, c)| PointValues { label: l.clone(), coords: rats_to_strings(c) })
                .collect(),
            certificate: self.certificate.iter().map(|r| rats_to_strings(r)).collect(),
            panel_coordinates: self.panel_coordinates,
            notes: self.notes.clone(),
        }
    }
}

/// Why a recorded equation set fails verification against an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum VerifyFailure {
    LabelMismatch,
    MalformedPoly(usize),
    CoordinateNotInPanel(String),
    NonZero { poly: usize, label: String, value: String },
}

/// Re-evaluates every polynomial of `rec` at every point of `panel`, using
/// the recorded coordinate values; panel coordinates are checked to be panel
/// functions of the instance.
pub fn verify_record(rec: &EquationSetRecord, panel: &Panel) -> Result<Vec<VerifyFailure>, InstanceError> {
    let labels = panel.config().labels();
    if rec.points.len() != labels.len() || rec.points.iter().zip(labels).any(|(p, l)| &p.label != l) {
        return Ok(vec![VerifyFailure::LabelMismatch]);
    }
    let n = rec.vars.len();
    let coords: Vec<Vec<Scalar>> = rec.points.iter().map(|p| parse_rats(&p.coords)).collect::<Result<_, _>>()?;
    let mut failures = Vec::new();
    if coords.iter().any(|c| c.len() != n) {
        return Ok(vec![VerifyFailure::LabelMismatch]);
    }
    if rec.panel_coordinates {
        for (k, name) in rec.vars.iter().enumerate() {
            let column: Vec<Scalar> = coords.iter().map(|c| c[k].clone()).collect();
            if !panel.contains(&FnVec::new(column)) {
                failures.push(VerifyFailure::CoordinateNotInPanel(name.clone()));
            }
        }
    }
    for (i, pr) in rec.polys.iter().enumerate() {
        if pr.vars != rec.vars || pr.terms.iter().any(|t| t.exps.len() != n) {
            failures.push(VerifyFailure::MalformedPoly(i));
            continue;
        }
        let terms = pr
            .terms
            .iter()
            .map(|t| Ok((t.exps.clone(), crate::instance::parse_rat(&t.coef)?)))
            .collect::<Result<Vec<_>, InstanceError>>()?;
        let p = Poly::from_terms(n, terms);
        for (label, x) in labels.iter().zip(&coords) {
            let v = p.eval(x);
            if !v.is_zero() {
                failures.push(VerifyFailure::NonZero { poly: i, label: label.clone(), value: v.to_string() });
            }
        }
    }
    Ok(failures)
}

/// One head vector `y^{(s)}_{qp}` of the sl2 basis, at level `p - q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Head {
    pub q: usize,
    pub p: usize,
    /// 1-based index among the heads with the same `(q, p)`.
    pub s: usize,
    /// Values on the classes of the reduction.
    pub values: Vec<Scalar>,
    /// Polynomial in the degree-one variables restricting to `values`, of
    /// degree at most `p - q + 1`.
    pub lifting: Poly,
}

/// The element `t^m · y^{(s)}_{qp}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Element {
    pub head: usize,
    pub m: usize,
    pub values: Vec<Scalar>,
    /// `T^m P`, restricting to `values`.
    pub lifting: Poly,
}

impl Sl2Element {
    /// Filtration degree: the element lies in `H̃₋(deg+1)`.
    pub fn degree(&self, heads: &[Sl2Head]) -> usize {
        let h = &heads[self.head];
        self.m + h.p - h.q
    }
}

/// An sl2-adapted basis of the functions on the reduced configuration.
#[derive(Clone, Debug)]
pub struct Sl2Basis {
    levels: usize,
    t: Vec<Scalar>,
    heads: Vec<Sl2Head>,
    elements: Vec<Sl2Element>,
    /// Heads with `q = p`, which start at level 0 and form a basis of the panel.
    variables: Vec<usize>,
    names: Vec<String>,
    t_form: Poly,
    one_form: Poly,
    /// Inverse of the matrix whose columns are the element values.
    inverse: Mat,
    class_of: Vec<usize>,
    labels: Vec<String>,
}

impl Sl2Basis {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn t(&self) -> &[Scalar] {
        &self.t
    }

    pub fn heads(&self) -> &[Sl2Head] {
        &self.heads
    }

    pub fn elements(&self) -> &[Sl2Element] {
        &self.elements
    }

    /// Names `Y{s}_{p}` of the degree-one variables.
    pub fn variable_names(&self) -> &[String] {
        &self.names
    }

    /// The linear form `T` restricting to `t`.
    pub fn t_form(&self) -> &Poly {
        &self.t_form
    }

    /// The linear form restricting to the constant 1, used to homogenize.
    pub fn one_form(&self) -> &Poly {
        &self.one_form
    }

    /// Heads with the given `(q, p)`.
    pub fn heads_of(&self, q: usize, p: usize) -> impl Iterator<Item = (usize, &Sl2Head)> {
        self.heads.iter().enumerate().filter(move |(_, h)| h.q == q && h.p == p)
    }

    /// Coordinates of the variables at every point of the configuration.
    fn point_coordinates(&self) -> Vec<Vec<Scalar>> {
        self.class_of
            .iter()
            .map(|&c| self.variables.iter().map(|&h| self.heads[h].values[c].clone()).collect())
            .collect()
    }

    /// Coordinates of `v` in the elements of degree at most `bound`.
    fn expand(&self, v: &[Scalar], bound: usize) -> Result<Vec<Scalar>, EqError> {
        let a = self.inverse.apply(v);
        for (e, c) in self.elements.iter().zip(&a) {
            if e.degree(&self.heads) > bound && !c.is_zero() {
                return Err(EqError::OutsideSpan("product"));
            }
        }
        Ok(a)
    }

    /// `Σ a_e T^m P_e`, the polynomial lifting of `Σ a_e e`.
    fn lift_combination(&self, a: &[Scalar]) -> Poly {
        let mut out = Poly::zero(self.names.len());
        for (e, c) in self.elements.iter().zip(a) {
            if !c.is_zero() {
                out = out + e.lifting.scale(c);
            }
        }
        out
    }
}

/// Monomials in the variables, chosen greedily by degree, whose values span
/// each filtration step; lifts any function on the classes.
struct MonomialBasis {
    exps: Vec<Exps>,
    degrees: Vec<u32>,
    inverse: Mat,
}

impl MonomialBasis {
    fn new(vars: &[&[Scalar]], dim: usize) -> Result<Self, EqError> {
        let n = vars.len();
        let mut eb = EchelonBuilder::new(dim);
        let mut exps = Vec::new();
        let mut columns = Vec::new();
        let mut k = 0u32;
        while eb.dim() < dim {
            if k as usize > dim {
                return Err(EqError::OutsideSpan("function on the classes"));
            }
            for e in monomials_of_degree(n, k) {
                let mut v = vec![Scalar::one(); dim];
                for (x, &pw) in vars.iter().zip(&e) {
                    for _ in 0..pw {
                        v = pointwise(&v, x);
                    }
                }
                if eb.insert(&v) {
                    exps.push(e);
                    columns.push(v);
                }
            }
            k += 1;
        }
        let degrees = exps.iter().map(|e| e.iter().sum()).collect();
        let inverse = Mat::from_columns(dim, &columns)?.inverse()?;
        Ok(MonomialBasis { exps, degrees, inverse })
    }

    fn lift(&self, v: &[Scalar], max_degree: u32) -> Result<Poly, EqError> {
        let n = self.exps[0].len();
        let a = self.inverse.apply(v);
        let mut out = Poly::zero(n);
        for ((e, d), c) in self.exps.iter().zip(&self.degrees).zip(a) {
            if c.is_zero() {
                continue;
            }
            if *d > max_degree {
                return Err(EqError::OutsideSpan("head"));
            }
            out = out + Poly::monomial(n, e.clone(), c);
        }
        Ok(out)
    }
}

/// The sl2 basis attached to the degree +1 part of multiplication by `t`.
pub fn sl2_basis(fibre: &Fibre, t: &FnVec) -> Result<Sl2Basis, EqError> {
    let tr = fibre.to_reduced(t)?;
    if tr.is_constant() {
        return Err(EqError::ConstantFunction);
    }
    let g = fibre.reduced();
    let dim = fibre.d_prime();
    let l = g.levels();
    let jordan = plus_jordan(fibre, t)?;
    let mut chains: Vec<_> = jordan.chains().iter().collect();
    chains.sort_by_key(|c| (c.len(), c.end_level));
    let mut raw_heads = Vec::with_capacity(chains.len());
    let mut s = 0;
    for (i, c) in chains.iter().enumerate() {
        let (q, p) = (c.len() - 1, c.end_level);
        s = if i > 0 && (chains[i - 1].len() - 1, chains[i - 1].end_level) == (q, p) { s + 1 } else { 1 };
        raw_heads.push((q, p, s, primitive(&g.vector_from_graded(c.head()))));
    }
    let variables: Vec<usize> = (0..raw_heads.len()).filter(|&i| raw_heads[i].0 == raw_heads[i].1).collect();
    let names: Vec<String> = variables.iter().map(|&i| format!("Y{}_{}", raw_heads[i].2, raw_heads[i].1)).collect();
    let var_values: Vec<&[Scalar]> = variables.iter().map(|&i| raw_heads[i].3.as_slice()).collect();
    let mono = MonomialBasis::new(&var_values, dim)?;
    let heads = raw_heads
        .iter()
        .map(|(q, p, s, v)| {
            Ok(Sl2Head { q: *q, p: *p, s: *s, lifting: mono.lift(v, (p - q + 1) as u32)?, values: v.clone() })
        })
        .collect::<Result<Vec<_>, EqError>>()?;
    let var_mat = Mat::from_columns(dim, &var_values.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
    let coeffs = |f: &[Scalar]| -> Result<Vec<Scalar>, EqError> {
        solve(&var_mat, f)?.ok_or(EqError::OutsideSpan("panel function"))
    };
    let t_form = Poly::linear(&coeffs(tr.values())?);
    let one_form = Poly::linear(&coeffs(&vec![Scalar::one(); dim])?);
    let mut elements = Vec::with_capacity(dim);
    for (i, h) in heads.iter().enumerate() {
        let mut v = h.values.clone();
        let mut lifting = h.lifting.clone();
        for m in 0..=h.q {
            if m > 0 {
                v = pointwise(&v, tr.values());
                lifting = &lifting * &t_form;
            }
            elements.push(Sl2Element { head: i, m, values: v.clone(), lifting: lifting.clone() });
        }
    }
    // adaptedness: elements of degree < i span the i-th filtration step
    let red = fibre.reduction();
    for i in 1..=l {
        let step: Vec<Vec<Scalar>> =
            fibre.filtration().step(i).vectors().iter().map(|v| red.restrict(v).expect("class-constant")).collect();
        let step = Subspace::from_rows(dim, &step)?;
        let subset: Vec<Vec<Scalar>> =
            elements.iter().filter(|e| e.degree(&heads) < i).map(|e| e.values.clone()).collect();
        let span = Subspace::from_rows(dim, &subset)?;
        if span != step || subset.len() != step.dim() {
            return Err(EqError::NotAdapted(i));
        }
    }
    let inverse = Mat::from_columns(dim, &elements.iter().map(|e| e.values.clone()).collect::<Vec<_>>())?
        .inverse()
        .map_err(|_| EqError::NotAdapted(l))?;
    let class_of = (0..fibre.d()).map(|z| red.class_of(z)).collect();
    Ok(Sl2Basis {
        levels: l,
        t: tr.into_values(),
        heads,
        elements,
        variables,
        names,
        t_form,
        one_form,
        inverse,
        class_of,
        labels: fibre.panel().config().labels().to_vec(),
    })
}

/// Non-homogeneous relations `F(m)` and their homogenizations `H(m)`.
#[derive(Clone, Debug)]
pub struct MonomialRelations {
    pub affine: EquationSet,
    pub homogeneous: EquationSet,
    /// Monomials whose restriction vanishes outright.
    pub vanishing_monomials: usize,
}

/// For every monomial `Y^m` with `2 ≤ |m| ≤ degree_cap`, expands `y^m` in the
/// basis elements of degree below `|m|` and emits `F(m) = Y^m − Σ a T^k P`.
pub fn monomial_relations(b: &Sl2Basis, degree_cap: u32) -> Result<MonomialRelations, EqError> {
    let n = b.names.len();
    let var_vals: Vec<&[Scalar]> = b.variables.iter().map(|&h| b.heads[h].values.as_slice()).collect();
    let mut affine = Vec::new();
    let mut homogeneous = Vec::new();
    let mut vanishing = 0;
    for k in 2..=degree_cap {
        for e in monomials_of_degree(n, k) {
            let mut v = vec![Scalar::one(); b.t.len()];
            for (x, &pw) in var_vals.iter().zip(&e) {
                for _ in 0..pw {
                    v = pointwise(&v, x);
                }
            }
            let ym = Poly::monomial(n, e, Scalar::one());
            let f = if v.iter().all(Zero::is_zero) {
                vanishing += 1;
                ym
            } else {
                let bound = (k as usize - 1).min(b.levels - 1);
                let a = b.expand(&v, bound)?;
                ym - b.lift_combination(&a)
            };
            if f.is_zero() {
                continue;
            }
            // relations that only restate Y = T / T_α homogenize to zero
            let h = f.homogenize(&b.one_form, k);
            if !h.is_zero() {
                homogeneous.push(h);
            }
            affine.push(f);
        }
    }
    let coords = b.point_coordinates();
    let t_names: Vec<String> = b.names.iter().map(|s| s.replacen('Y', "T", 1)).collect();
    let mut a = EquationSet::new("monomial-affine", b.names.clone(), affine, b.labels.clone(), coords.clone(), true);
    a.notes.push(format!("degree cap {degree_cap}"));
    let mut h = EquationSet::new("monomial", t_names, homogeneous, b.labels.clone(), coords, true);
    h.notes.push(format!("degree cap {degree_cap}; homogenized with the linear form of the constant 1"));
    Ok(MonomialRelations { affine: a.checked()?, homogeneous: h.checked()?, vanishing_monomials: vanishing })
}

/// The `μ_{qp}` forms `T̃^{q+1} Q − T_α^… A` of degree `p + 2` from the chain
/// ends of length `q + 1` at level `p`.
pub fn rank_bounded_relations(b: &Sl2Basis, q: usize, p: usize) -> Result<EquationSet, EqError> {
    let mut polys = Vec::new();
    let heads: Vec<(usize, Sl2Head)> = b.heads_of(q, p).map(|(i, h)| (i, h.clone())).collect();
    for (_, h) in &heads {
        let mut v = h.values.clone();
        for _ in 0..=q {
            v = pointwise(&v, &b.t);
        }
        let a = b.expand(&v, p)?;
        let f = &b.t_form.pow(q as u32 + 1) * &h.lifting - b.lift_combination(&a);
        polys.push(f.homogenize(&b.one_form, p as u32 + 2));
    }
    let t_names: Vec<String> = b.names.iter().map(|s| s.replacen('Y', "T", 1)).collect();
    let mut set = EquationSet::new("chain-end", t_names, polys, b.labels.clone(), b.point_coordinates(), true);
    set.notes.push(format!("(q, p) = ({q}, {p}), degree {}", p + 2));
    set.checked()
}

/// Chain-end relations for every nonzero multiplicity.
pub fn all_rank_bounded_relations(b: &Sl2Basis) -> Result<Vec<((usize, usize), EquationSet)>, EqError> {
    let mut keys: Vec<(usize, usize)> = b.heads.iter().map(|h| (h.q, h.p)).collect();
    keys.dedup();
    keys.into_iter().map(|(q, p)| Ok(((q, p), rank_bounded_relations(b, q, p)?))).collect()
}

/// Greedy choice of point indices whose evaluations on `basis` are independent,
/// stopping at `want`.
fn spanning_points(basis: &[Vec<Scalar>], points: impl Iterator<Item = usize>, want: usize) -> Vec<usize> {
    let mut eb = EchelonBuilder::new(basis.len());
    let mut chosen = Vec::new();
    for z in points {
        if chosen.len() == want {
            break;
        }
        let row: Vec<Scalar> = basis.iter().map(|f| f[z].clone()).collect();
        if eb.insert(&row) {
            chosen.push(z);
        }
    }
    chosen
}

/// Functions `x_i` in the span of `basis` with `x_i(z_j) = δ_ij`.
fn dual_basis(basis: &[Vec<Scalar>], points: &[usize]) -> Result<Vec<Vec<Scalar>>, EqError> {
    let e = Mat::from_rows(basis.len(), &points.iter().map(|&z| basis.iter().map(|f| f[z].clone()).collect()).collect::<Vec<_>>())?;
    let inv = e.inverse()?;
    Ok((0..points.len())
        .map(|i| {
            let c = inv.column(i);
            let mut x = vec![Scalar::zero(); basis[0].len()];
            for (ck, f) in c.iter().zip(basis) {
                for (xz, fz) in x.iter_mut().zip(f) {
                    *xz += ck * fz;
                }
            }
            x
        })
        .collect())
}

/// Quadrics `X_i X_j − X_1 H_ij` through the configuration.
#[derive(Clone, Debug)]
pub struct Quadrics {
    pub set: EquationSet,
    /// Indices of the points dual to the coordinates.
    pub dual_points: Vec<usize>,
    /// Dimension of the span of the quadrics.
    pub independent: usize,
    /// Rank of each quadric's symmetric matrix.
    pub matrix_ranks: Vec<usize>,
}

pub fn rank4_quadrics(fibre: &Fibre) -> Result<Quadrics, EqError> {
    let panel = fibre.panel();
    let d = panel.d();
    if fibre.d_prime() != d {
        return Err(EqError::NotGeneralPosition(format!("the panel separates only {} of {d} points", fibre.d_prime())));
    }
    let g = fibre.ambient();
    if g.levels() < 2 {
        return Err(EqError::NotGeneralPosition("the filtration has no second step".into()));
    }
    let basis = panel.space().vectors();
    let n = basis.len();
    let pts = spanning_points(&basis, 0..d, n);
    let x = dual_basis(&basis, &pts)?;
    // trace-zero panel functions
    let ones = vec![Scalar::one(); d];
    let orth: Vec<Scalar> = g.form().gram().apply(&ones);
    let h = panel.space().intersect(&kernel(&Mat::from_rows(d, &[orth])?))?;
    let hb = h.vectors();
    let h1 = g.summand(1);
    let plus: Vec<Mat> = x.iter().map(|xi| Ok(triangular(&FnVec::new(xi.clone()), g)?.plus)).collect::<Result<_, EqError>>()?;
    let images = |i: usize| Mat::from_columns(d, &hb.iter().map(|v| plus[i].apply(v)).collect::<Vec<_>>());
    for i in 0..n {
        let m = images(i)?;
        if h1.dim() != hb.len() || m.rank() != hb.len() {
            return Err(EqError::HypothesisDHFails(i + 1));
        }
    }
    let m1 = images(0)?;
    let mut polys = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            let rhs = plus[i].apply(&x[j]);
            let c = solve(&m1, &rhs)?.ok_or(EqError::OutsideSpan("D⁺(x_i)(x_j)"))?;
            let mut hp = vec![Scalar::zero(); d];
            for (ck, v) in c.iter().zip(&hb) {
                for (a, b) in hp.iter_mut().zip(v) {
                    *a += ck * b;
                }
            }
            let rest: Vec<Scalar> =
                pointwise(&x[i], &x[j]).iter().zip(pointwise(&x[0], &hp)).map(|(a, b)| a - b).collect();
            let c0 = rest[pts[0]].clone();
            if rest.iter().zip(&x[0]).any(|(r, x0)| r != &(&c0 * x0)) {
                return Err(EqError::OutsideSpan("x_i x_j − x_1 h′"));
            }
            let hfull: Vec<Scalar> = hp.iter().map(|v| v + &c0).collect();
            let hform = Poly::linear(&pts.iter().map(|&z| hfull[z].clone()).collect::<Vec<_>>());
            let q = &Poly::var(n, i) * &Poly::var(n, j) - &Poly::var(n, 0) * &hform;
            polys.push(q);
        }
    }
    let names: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    let coords: Vec<Vec<Scalar>> = (0..d).map(|z| x.iter().map(|xi| xi[z].clone()).collect()).collect();
    let mut set = EquationSet::new("rank4", names, polys, panel.config().labels().to_vec(), coords, true);
    set.notes.push(format!("dual to points {:?}", pts.iter().map(|&z| panel.config().label(z)).collect::<Vec<_>>()));
    let set = set.checked()?;
    let matrix_ranks = set.polys.iter().map(|p| p.quadratic_matrix().rank()).collect();
    Ok(Quadrics { independent: set.rank(), set, dual_points: pts, matrix_ranks })
}

/// Decomposition of the points by a panel function vanishing on a hyperplane's worth of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mu00Split {
    /// Panel function on all points, vanishing at the chosen classes.
    pub t: FnVec,
    /// Classes of the reduction spanning the hyperplane `t = 0`.
    pub chosen: Vec<usize>,
    /// Points where `t` vanishes.
    pub z1: Vec<usize>,
    pub z2: Vec<usize>,
    /// `dim ker D⁺(t) ∩ H⁰`.
    pub mu00: usize,
    /// `ξ` on the basis of `ker D⁺(t) ∩ H⁰`, with `D⁰(t)x = ξ(x) t`.
    pub xi: Vec<Scalar>,
    /// Panel functions vanishing on `Z₂`, which should be `ker ξ` of dim `μ₀₀ − 1`.
    pub vanishing_on_z2: usize,
    /// Panel functions vanishing on `Z₁`, which should be the line of `t`.
    pub vanishing_on_z1: usize,
    /// Least `μ₀₀` seen over random panel functions.
    pub generic_mu00: usize,
}

impl Mu00Split {
    pub fn counts_match(&self) -> bool {
        self.vanishing_on_z2 + 1 == self.mu00 && self.vanishing_on_z1 == 1
    }
}

fn kernel_dim_level0(fibre: &Fibre, t: &FnVec) -> Result<(usize, Vec<Vec<Scalar>>), EqError> {
    let g = fibre.reduced();
    let parts = graded_parts(&fibre.to_reduced(t)?, g)?;
    if g.levels() < 2 {
        let k: Vec<Vec<Scalar>> = Subspace::full(g.level_range(0).len()).vectors();
        return Ok((k.len(), k));
    }
    let k = kernel(&parts.block(g, 1, 0)).vectors();
    Ok((k.len(), k))
}

fn vanishing_dim(panel: &Panel, points: &[usize]) -> Result<usize, EqError> {
    let d = panel.d();
    if points.is_empty() {
        return Ok(panel.space().dim());
    }
    let rows: Vec<Vec<Scalar>> = points
        .iter()
        .map(|&z| (0..d).map(|k| if k == z { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    Ok(panel.space().intersect(&kernel(&Mat::from_rows(d, &rows)?))?.dim())
}

pub fn mu00_split(fibre: &Fibre, samples: usize, seed: u64) -> Result<Mu00Split, EqError> {
    let panel = fibre.panel();
    let r = panel.r();
    let red = fibre.reduction();
    let g = fibre.reduced();
    let basis: Vec<Vec<Scalar>> = fibre.reduced_panel_basis().into_iter().map(FnVec::into_values).collect();
    let chosen = spanning_points(&basis, 0..fibre.d_prime(), r);
    if chosen.len() < r || r == 0 {
        return Err(EqError::NotGeneralEnough);
    }
    let evals: Vec<Vec<Scalar>> = chosen.iter().map(|&c| basis.iter().map(|f| f[c].clone()).collect()).collect();
    let null = kernel(&Mat::from_rows(basis.len(), &evals)?);
    if null.dim() != 1 {
        return Err(EqError::NotGeneralEnough);
    }
    let coeffs = primitive(&null.vectors()[0]);
    let tr: Vec<Scalar> = (0..fibre.d_prime())
        .map(|c| coeffs.iter().zip(&basis).map(|(a, f)| a * &f[c]).sum())
        .collect();
    let t = FnVec::new(red.expand(&tr));
    if is_constant(&tr) {
        return Err(EqError::NotGeneralEnough);
    }
    let (mu00, k0) = kernel_dim_level0(fibre, &t)?;
    // k0 is in level-0 coordinates; the level-0 block of D⁰(t) acts there too
    let parts = graded_parts(&fibre.to_reduced(&t)?, g)?;
    let zero0 = parts.block(g, 0, 0);
    let t_graded = g.vector_to_graded(&tr);
    let t_level0 = t_graded[g.level_range(0)].to_vec();
    let pivot = t_level0.iter().position(|c| !c.is_zero()).ok_or(EqError::NotGeneralEnough)?;
    let mut xi = Vec::with_capacity(k0.len());
    for x in &k0 {
        let y = zero0.apply(x);
        let c = &y[pivot] / &t_level0[pivot];
        if y.iter().zip(&t_level0).any(|(a, b)| a != &(&c * b)) {
            return Err(EqError::OutsideSpan("D⁰(t)x"));
        }
        xi.push(c);
    }
    let z1: Vec<usize> = (0..fibre.d()).filter(|&z| t.values()[z].is_zero()).collect();
    let z2: Vec<usize> = (0..fibre.d()).filter(|&z| !t.values()[z].is_zero()).collect();
    let vanishing_on_z2 = vanishing_dim(panel, &z2)?;
    let vanishing_on_z1 = vanishing_dim(panel, &z1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generic_mu00 = mu00;
    for _ in 0..samples {
        let s = random_panel_element(fibre, &mut rng, 10);
        generic_mu00 = generic_mu00.min(kernel_dim_level0(fibre, &s)?.0);
    }
    Ok(Mu00Split {
        t,
        chosen,
        z1,
        z2,
        mu00,
        xi,
        vanishing_on_z2,
        vanishing_on_z1,
        generic_mu00,
    })
}

/// One row of the adjoint basis: `φ_{im} = t^m f_i` for `m < λ̂_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointRow {
    /// Highest-weight vector `f_i` on all points.
    pub f: Vec<Scalar>,
    pub top_level: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointCoordinates {
    pub lambda_hat: Partition,
    pub rows: Vec<AdjointRow>,
    /// `X{i}_{m}`, 1-based row index.
    pub names: Vec<String>,
    /// `values[k][z]`: coordinate `k` at point `z`.
    pub values: Vec<Vec<Scalar>>,
    pub labels: Vec<String>,
}

impl AdjointCoordinates {
    /// Index of `X_{im}` (0-based row `i`).
    pub fn index(&self, i: usize, m: usize) -> usize {
        self.rows[..i].iter().map(|r| r.length).sum::<usize>() + m
    }
}

/// Coordinates on the points from the truncated `D⁻(t)` chains on all points.
pub fn adjoint_coordinates(fibre: &Fibre, t: &FnVec) -> Result<AdjointCoordinates, EqError> {
    let tr = truncate(fibre, t)?;
    let mut rows = Vec::new();
    let mut names = Vec::new();
    let mut values = Vec::new();
    for row in tr.rows.iter().filter(|r| r.truncated > 0) {
        let i = rows.len() + 1;
        let mut v = row.head.clone();
        for m in 0..row.truncated {
            if m > 0 {
                v = pointwise(&v, t.values());
            }
            names.push(format!("X{i}_{m}"));
            values.push(v.clone());
        }
        rows.push(AdjointRow { f: row.head.clone(), top_level: row.top_level, length: row.truncated });
    }
    Ok(AdjointCoordinates {
        lambda_hat: tr.truncated,
        rows,
        names,
        values,
        labels: fibre.panel().config().labels().to_vec(),
    })
}

/// 2×2 minors of `[X_{i(λ̂ᵢ-2)} … X_{i0}; X_{i(λ̂ᵢ-1)} … X_{i1}]` for each row.
pub fn scroll_equations(adj: &AdjointCoordinates) -> Result<EquationSet, EqError> {
    let n = adj.names.len();
    let mut polys = Vec::new();
    for (i, row) in adj.rows.iter().enumerate() {
        let len = row.length;
        if len < 3 {
            continue;
        }
        let x = |m: usize| Poly::var(n, adj.index(i, m));
        for a in 0..len - 1 {
            for b in a + 1..len - 1 {
                polys.push(&x(a) * &x(b + 1) - &x(b) * &x(a + 1));
            }
        }
    }
    let d = adj.labels.len();
    let coords: Vec<Vec<Scalar>> = (0..d).map(|z| adj.values.iter().map(|v| v[z].clone()).collect()).collect();
    let mut set = EquationSet::new("scroll", adj.names.clone(), polys, adj.labels.clone(), coords, false);
    set.notes.push(format!("truncated partition {}", adj.lambda_hat));
    if set.is_empty() {
        set.notes.push(format!("no row of length ≥ 3; the scroll is all of P^{}", n.saturating_sub(1)));
    }
    set.checked()
}

/// Sign-insensitive check that every point has a nonzero coordinate vector.
pub fn coordinates_nonzero(adj: &AdjointCoordinates) -> bool {
    (0..adj.labels.len()).all(|z| adj.values.iter().any(|v| v[z].abs().is_positive()))
}
