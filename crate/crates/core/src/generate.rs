//! Seeded synthetic instances: random points with linear functions, points
//! on a line, quasi-abelian block panels, points on a rational normal curve,
//! and disjoint unions of these.

use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::configmodel::{ConfigError, Configuration, FnVec, Panel};
use crate::exactlin::{int, Scalar, Subspace};
use crate::filtration::compute_filtration;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("unknown generator spec {0:?}")]
    BadSpec(String),
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("no instance with generic Hilbert function after {0} attempts")]
    Exhausted(usize),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Which instance to build, parsed from `kind:param:...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenSpec {
    /// `d` random points in affine `r`-space with the panel of affine-linear functions.
    General { d: usize, r: usize },
    /// `d` points on a line with the panel spanned by `1` and the coordinate.
    Chain { d: usize },
    /// Panel spanned by the indicators of blocks with the given sizes.
    Blocks { sizes: Vec<usize> },
    /// `2m` points on a rational normal curve of degree `m - 1`.
    Rnc { m: usize },
    /// Disjoint union, with the direct sum of the panels.
    Union(Vec<GenSpec>),
}

impl FromStr for GenSpec {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let bad = || GenError::BadSpec(s.to_string());
        if s.contains('+') {
            return Ok(GenSpec::Union(s.split('+').map(str::parse).collect::<Result<_, _>>()?));
        }
        let mut it = s.split(':');
        let kind = it.next().ok_or_else(bad)?;
        let nums: Vec<usize> = it.map(|x| x.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        match (kind, nums.as_slice()) {
            ("general", &[d, r]) => Ok(GenSpec::General { d, r }),
            ("chain", &[d]) => Ok(GenSpec::Chain { d }),
            ("blocks", sizes) if !sizes.is_empty() => Ok(GenSpec::Blocks { sizes: sizes.to_vec() }),
            ("rnc", &[m]) => Ok(GenSpec::Rnc { m }),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for GenSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenSpec::General { d, r } => write!(f, "general:{d}:{r}"),
            GenSpec::Chain { d } => write!(f, "chain:{d}"),
            GenSpec::Blocks { sizes } => {
                write!(f, "blocks")?;
                sizes.iter().try_for_each(|s| write!(f, ":{s}"))
            }
            GenSpec::Rnc { m } => write!(f, "rnc:{m}"),
            GenSpec::Union(parts) => {
                let s: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "{}", s.join("+"))
            }
        }
    }
}

const COORD_BOUND: i64 = 6;
const ATTEMPTS: usize = 200;

fn labels(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("z{i}")).collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Distinct integers drawn from `[-bound, bound]`.
fn distinct_ints(rng: &mut ChaCha8Rng, count: usize, bound: i64) -> Vec<i64> {
    let width = (2 * bound + 1) as usize;
    sample(rng, width, count).into_iter().map(|i| i as i64 - bound).collect()
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Panel, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        GenSpec::General { d, r } => general(*d, *r, &mut rng),
        GenSpec::Chain { d } => chain(*d),
        GenSpec::Blocks { sizes } => blocks(sizes),
        GenSpec::Rnc { m } => rnc(*m, &mut rng),
        GenSpec::Union(parts) => {
            let panels = parts
                .iter()
                .map(|p| generate(p, rng.gen()))
                .collect::<Result<Vec<_>, _>>()?;
            union(&panels)
        }
    }
}

fn general(d: usize, r: usize, rng: &mut ChaCha8Rng) -> Result<Panel, GenError> {
    if r == 0 || d < r + 1 {
        return Err(GenError::BadParams(format!("general needs r >= 1 and d >= r+1, got d={d}, r={r}")));
    }
    // generic point sets have dim H̃₋ᵢ = min(C(r+i, r), d)
    let expected: Vec<usize> = (1..).map(|i| binomial(r + i, r).min(d)).take_while(|&x| x < d).collect();
    // on a line the points need room to be distinct
    let bound = if r == 1 { COORD_BOUND.max(d as i64) } else { COORD_BOUND };
    for _ in 0..ATTEMPTS {
        let coords: Vec<Vec<i64>> = (0..d).map(|_| (0..r).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
        let config = match Configuration::new(
            labels(d),
            Some(coords.iter().map(|c| c.iter().map(|&x| int(x)).collect()).collect()),
        ) {
            Ok(c) => c,
            Err(ConfigError::DuplicatePoint(..)) => continue,
            Err(e) => return Err(e.into()),
        };
        let fns: Vec<FnVec> = (0..r).map(|k| FnVec::new(coords.iter().map(|c| int(c[k])).collect())).collect();
        let Ok(panel) = Panel::from_functions(config, &fns) else { continue };
        let dims = compute_filtration(&panel).dims();
        if dims[..dims.len() - 1] == expected[..] && dims.last() == Some(&d) {
            return Ok(panel);
        }
    }
    Err(GenError::Exhausted(ATTEMPTS))
}

fn chain(d: usize) -> Result<Panel, GenError> {
    if d < 2 {
        return Err(GenError::BadParams(format!("chain needs d >= 2, got {d}")));
    }
    let t: Vec<i64> = (0..d as i64).collect();
    let config = Configuration::new(labels(d), Some(t.iter().map(|&x| vec![int(x)]).collect()))?;
    Ok(Panel::from_functions(config, &[FnVec::from_ints(&t)])?)
}

fn blocks(sizes: &[usize]) -> Result<Panel, GenError> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(GenError::BadParams("blocks needs at least two nonempty blocks".into()));
    }
    let d: usize = sizes.iter().sum();
    let mut coords = Vec::with_capacity(d);
    let mut indicators = Vec::with_capacity(sizes.len());
    for (b, &size) in sizes.iter().enumerate() {
        let mut ind = vec![0i64; d];
        for k in 0..size {
            ind[coords.len()] = 1;
            coords.push(vec![int(b as i64), int(k as i64)]);
        }
        indicators.push(FnVec::from_ints(&ind));
    }
    let config = Configuration::new(labels(d), Some(coords))?;
    Ok(Panel::from_functions(config, &indicators)?)
}

fn rnc(m: usize, rng: &mut ChaCha8Rng) -> Result<Panel, GenError> {
    if m < 2 {
        return Err(GenError::BadParams(format!("rnc needs m >= 2, got {m}")));
    }
    let s = distinct_ints(rng, 2 * m, 20);
    let coords: Vec<Vec<Scalar>> =
        s.iter().map(|&x| (1..m as u32).map(|k| int(x.pow(k))).collect()).collect();
    let config = Configuration::new(labels(2 * m), Some(coords))?;
    let fns: Vec<FnVec> =
        (1..m as u32).map(|k| FnVec::new(s.iter().map(|&x| int(x.pow(k))).collect())).collect();
    Ok(Panel::from_functions(config, &fns)?)
}

/// Disjoint union; each point's coordinates get the part index appended
/// when all parts have coordinates of one length.
pub fn union(parts: &[Panel]) -> Result<Panel, GenError> {
    if parts.len() < 2 {
        return Err(GenError::BadParams("union needs at least two parts".into()));
    }
    let d: usize = parts.iter().map(Panel::d).sum();
    let width = parts[0].config().coords().map(|c| c[0].len());
    let keep_coords = parts.iter().all(|p| p.config().coords().map(|c| c[0].len()) == width) && width.is_some();
    let mut coords = Vec::with_capacity(d);
    let mut rows = Vec::new();
    let mut offset = 0;
    for (k, p) in parts.iter().enumerate() {
        if keep_coords {
            for c in p.config().coords().unwrap() {
                let mut c = c.clone();
                c.push(int(k as i64));
                coords.push(c);
            }
        }
        for v in p.space().vectors() {
            let mut row = vec![Scalar::from_integer(0.into()); d];
            row[offset..offset + p.d()].clone_from_slice(&v);
            rows.push(row);
        }
        offset += p.d();
    }
    let config = Configuration::new(labels(d), keep_coords.then_some(coords))?;
    let space = Subspace::from_rows(d, &rows).map_err(ConfigError::from)?;
    Ok(Panel::new(config, space)?)
}
