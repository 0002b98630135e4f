//! Command implementations behind the `fibrekit` binary.
//!
//! Every command returns a JSON value; `main` wraps it in a run record with
//! the command name, seed and input hash. Readers of instance and equation
//! files accept either a bare record or such a run record.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use fibrekit::configmodel::{ConfigError, FnVec, Panel};
use fibrekit::equations::{
    adjoint_coordinates, all_rank_bounded_relations, monomial_relations, mu00_split, rank4_quadrics,
    scroll_equations, sl2_basis, verify_record, EquationSet, EquationSetRecord, VerifyFailure,
};
use fibrekit::exactlin::Scalar;
use fibrekit::fibre::Fibre;
use fibrekit::generate::{generate, GenSpec};
use fibrekit::instance::{parse_rat_list, rats_to_strings, InstanceRecord};
use fibrekit::liealg::{center_and_blocks, classify, generate_lie_algebra, torelli_index, Classification};
use fibrekit::nilorbit::{
    bigrading, check_weight_filtrations, loop_exponents, minus_jordan, plus_jordan, random_panel_element,
    sample_strata, truncate, GradedPartition,
};
use fibrekit::partition::Partition;
use fibrekit::springerchar::macdonald_value;
use fibrekit::Error;

pub const SCHEMA: &str = "1";

/// Exit status for results contradicting a proven property.
pub const EXIT_INVARIANT: i32 = 3;
/// Exit status for inputs failing a precondition.
pub const EXIT_PRECONDITION: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_invariant_violation() => EXIT_INVARIANT,
            _ => EXIT_PRECONDITION,
        }
    }
}

fn core<E: Into<Error>>(e: E) -> CliError {
    CliError::Core(e.into())
}

/// Hex SHA-256 of the input bytes.
pub fn input_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Unwraps a run record's `result` field; leaves other values unchanged.
fn payload(v: Value) -> Value {
    match v {
        Value::Object(mut m) if m.contains_key("command") && m.contains_key("result") => {
            m.remove("result").unwrap_or(Value::Null)
        }
        v => v,
    }
}

fn parse_json(text: &str, path: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map(payload).map_err(|source| CliError::Json { path: path.to_string(), source })
}

pub fn load_panel(text: &str, path: &str) -> Result<Panel, CliError> {
    let rec: InstanceRecord =
        serde_json::from_value(parse_json(text, path)?).map_err(|source| CliError::Json { path: path.into(), source })?;
    rec.to_panel().map_err(core)
}

pub fn load_equations(text: &str, path: &str) -> Result<EquationSetRecord, CliError> {
    serde_json::from_value(parse_json(text, path)?).map_err(|source| CliError::Json { path: path.into(), source })
}

fn fibre_of(panel: Panel) -> Result<Fibre, CliError> {
    Fibre::new(panel).map_err(core)
}

/// The panel function to use: the given values, or a seeded random element
/// that is not constant on the reduced configuration.
pub fn choose_t(fibre: &Fibre, t: Option<&str>, seed: u64) -> Result<FnVec, CliError> {
    if let Some(s) = t {
        let vals = parse_rat_list(s).map_err(core)?;
        if vals.len() != fibre.d() {
            return Err(core(ConfigError::ConfigMismatch { expected: fibre.d(), found: vals.len() }));
        }
        let t = FnVec::new(vals);
        if !fibre.panel().contains(&t) {
            return Err(core(ConfigError::NotInPanel));
        }
        return Ok(t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = random_panel_element(fibre, &mut rng, 10);
    for _ in 0..100 {
        if !fibre.to_reduced(&t).map_err(core)?.is_constant() {
            break;
        }
        t = random_panel_element(fibre, &mut rng, 10);
    }
    Ok(t)
}

fn strs(v: &[Scalar]) -> Vec<String> {
    rats_to_strings(v)
}

fn labels_of(panel: &Panel, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&z| panel.config().label(z).to_string()).collect()
}

pub fn cmd_gen(spec: &str, seed: u64) -> Result<Value, CliError> {
    let spec: GenSpec = spec.parse().map_err(core)?;
    let panel = generate(&spec, seed).map_err(core)?;
    Ok(serde_json::to_value(InstanceRecord::from_panel(&panel)).expect("instance record serializes"))
}

pub fn cmd_analyze(panel: Panel) -> Result<Value, CliError> {
    let fibre = fibre_of(panel)?;
    let p = fibre.panel();
    let alg = generate_lie_algebra(&fibre).map_err(core)?;
    let report = center_and_blocks(&alg, &fibre).map_err(core)?;
    let class = classify(&report);
    let torelli = torelli_index(&fibre).map_err(core)?;
    let mixed = match &class {
        Classification::Mixed { singular, multiple } => json!({"singular": singular, "multiple": multiple}),
        _ => Value::Null,
    };
    Ok(json!({
        "d": fibre.d(),
        "r": p.r(),
        "length": fibre.length(),
        "filtration_dims": fibre.filtration().dims(),
        "hilbert": fibre.hilbert(),
        "d_prime": fibre.d_prime(),
        "reduction_classes": fibre.reduction().blocks().iter().map(|b| labels_of(p, b)).collect::<Vec<_>>(),
        "summand_dims": fibre.ambient().dims(),
        "lie": {
            "algebra_dim": report.algebra_dim,
            "center_dim": report.center_dim,
            "blocks": report.blocks.iter().map(|b| labels_of(p, b)).collect::<Vec<_>>(),
            "weight_dims": report.weight_dims,
            "plus_vanishes": report.plus_vanishes,
        },
        "classification": class.tag(),
        "mixed_blocks": mixed,
        "torelli": {
            "kernel_dims": torelli.kernel_dims,
            "index": torelli.index,
            "strong": torelli.is_strong(),
            "total_kernel_dim": torelli.total_kernel_dim,
            "minus_kernel_dim": torelli.minus_kernel_dim,
            "kernels_agree": torelli.kernels_agree,
        },
        "delta_heads_vanishing": labels_of(p, &fibre.delta_heads_vanishing()),
    }))
}

pub fn cmd_jordan(panel: Panel, t: Option<&str>, seed: u64, samples: Option<usize>) -> Result<Value, CliError> {
    let fibre = fibre_of(panel)?;
    let t = choose_t(&fibre, t, seed)?;
    let plus = plus_jordan(&fibre, &t).map_err(core)?;
    let minus = minus_jordan(&fibre, &t).map_err(core)?;
    let m = plus.multiplicities();
    let gp = GradedPartition::from_matrix(&m);
    let mm = minus.minus_multiplicities();
    let trunc = truncate(&fibre, &t).map_err(core)?;
    let weights = check_weight_filtrations(&fibre, &t).map_err(core)?;
    let strata = match samples {
        Some(n) => {
            let s = sample_strata(&fibre, n, seed).map_err(core)?;
            json!({
                "samples": s.samples,
                "observed": s.observed.iter().map(|(m, c)| json!({"matrix": m, "count": c})).collect::<Vec<_>>(),
                "generic": s.generic,
                "ambiguous": s.ambiguous,
                "partitions": s.partitions,
            })
        }
        None => Value::Null,
    };
    Ok(json!({
        "t": strs(t.values()),
        "lambda": plus.partition(),
        "graded_partition": gp,
        "plus_multiplicities": m,
        "minus_multiplicities": mm,
        "minus_matches_reflection": mm == m.reflected(),
        "predicted_hilbert": gp.predicted_hilbert(),
        "bigrading": bigrading(&plus),
        "weight_filtrations": {
            "orthogonal": weights.orthogonal,
            "dims_match": weights.dims_match,
            "powers_iso": weights.powers_iso,
        },
        "truncation": {
            "lambda": trunc.lambda,
            "lambda_hat": trunc.truncated,
            "erased": trunc.erased,
        },
        "strata": strata,
    }))
}

pub fn cmd_loop(panel: Panel, t: Option<&str>, seed: u64) -> Result<Value, CliError> {
    let fibre = fibre_of(panel)?;
    let t = choose_t(&fibre, t, seed)?;
    let plus = plus_jordan(&fibre, &t).map_err(core)?;
    let data = loop_exponents(&plus, fibre.hilbert()).map_err(core)?;
    let label: Vec<String> = data.exponents.iter().map(i64::to_string).collect();
    Ok(json!({
        "t": strs(t.values()),
        "traces": data.traces,
        "exponents": data.exponents,
        "trace_sum": data.traces.iter().sum::<i64>(),
        "coweight": format!("({})", label.join(",")),
    }))
}

pub fn cmd_mu00(panel: Panel, samples: usize, seed: u64) -> Result<Value, CliError> {
    let fibre = fibre_of(panel)?;
    let s = mu00_split(&fibre, samples, seed).map_err(core)?;
    let p = fibre.panel();
    Ok(json!({
        "t": strs(s.t.values()),
        "chosen_classes": s.chosen,
        "z1": labels_of(p, &s.z1),
        "z2": labels_of(p, &s.z2),
        "mu00": s.mu00,
        "xi": strs(&s.xi),
        "vanishing_on_z2": s.vanishing_on_z2,
        "vanishing_on_z1": s.vanishing_on_z1,
        "counts_match": s.counts_match(),
        "generic_mu00": s.generic_mu00,
    }))
}

/// Which equation family to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqKind {
    /// Homogenized monomial relations among the sl2 coordinates.
    Monomial,
    /// The same relations before homogenization.
    MonomialAffine,
    /// Chain-end relations for every nonzero multiplicity.
    ChainEnd,
    Rank4,
    Scroll,
}

impl std::str::FromStr for EqKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "monomial" => Ok(EqKind::Monomial),
            "monomial-affine" => Ok(EqKind::MonomialAffine),
            "chain-end" => Ok(EqKind::ChainEnd),
            "rank4" => Ok(EqKind::Rank4),
            "scroll" => Ok(EqKind::Scroll),
            _ => Err(CliError::Usage(format!("unknown equation kind {s:?}"))),
        }
    }
}

/// All chain-end relations in one set, with the sizes by `(q, p)` as notes.
fn chain_end_set(fibre: &Fibre, t: &FnVec) -> Result<EquationSet, CliError> {
    let b = sl2_basis(fibre, t).map_err(core)?;
    let all = all_rank_bounded_relations(&b).map_err(core)?;
    let Some((_, first)) = all.first() else {
        return Err(CliError::Usage("no chains to build relations from".into()));
    };
    let polys = all.iter().flat_map(|(_, s)| s.polys.iter().cloned()).collect();
    let mut set =
        EquationSet::new("chain-end", first.variables.clone(), polys, first.labels.clone(), first.coordinates.clone(), true);
    for ((q, p), s) in &all {
        set.notes.push(format!("q={q} p={p}: {} forms of degree {}, rank {}", s.len(), p + 2, s.rank()));
    }
    Ok(set)
}

pub fn equation_set(fibre: &Fibre, kind: EqKind, t: &FnVec, degree_cap: u32) -> Result<EquationSet, CliError> {
    match kind {
        EqKind::Monomial | EqKind::MonomialAffine => {
            let b = sl2_basis(fibre, t).map_err(core)?;
            let r = monomial_relations(&b, degree_cap).map_err(core)?;
            Ok(if kind == EqKind::Monomial { r.homogeneous } else { r.affine })
        }
        EqKind::ChainEnd => chain_end_set(fibre, t),
        EqKind::Rank4 => Ok(rank4_quadrics(fibre).map_err(core)?.set),
        EqKind::Scroll => {
            let adj = adjoint_coordinates(fibre, t).map_err(core)?;
            scroll_equations(&adj).map_err(core)
        }
    }
}

pub fn cmd_equations(
    panel: Panel,
    kind: EqKind,
    t: Option<&str>,
    seed: u64,
    degree_cap: u32,
) -> Result<Value, CliError> {
    let fibre = fibre_of(panel)?;
    let t = choose_t(&fibre, t, seed)?;
    let set = equation_set(&fibre, kind, &t, degree_cap)?;
    Ok(serde_json::to_value(set.to_record()).expect("equation record serializes"))
}

pub fn cmd_macdonald(mu: &str, n: Option<usize>) -> Result<Value, CliError> {
    let parts = mu
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad partition {mu:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mu = Partition::new(parts);
    let n = n.unwrap_or(mu.weight());
    let v = macdonald_value(&mu, n).map_err(core)?;
    Ok(serde_json::to_value(v).expect("symmetric function serializes"))
}

/// Outcome of `verify`: the report and whether every check passed.
pub fn cmd_verify(rec: &EquationSetRecord, panel: &Panel) -> Result<(Value, bool), CliError> {
    let failures = verify_record(rec, panel).map_err(core)?;
    let describe = |f: &VerifyFailure| match f {
        VerifyFailure::LabelMismatch => json!({"failure": "label_mismatch"}),
        VerifyFailure::MalformedPoly(i) => json!({"failure": "malformed_poly", "poly": i}),
        VerifyFailure::CoordinateNotInPanel(v) => json!({"failure": "coordinate_not_in_panel", "variable": v}),
        VerifyFailure::NonZero { poly, label, value } => {
            json!({"failure": "nonzero", "poly": poly, "point": label, "value": value})
        }
    };
    let ok = failures.is_empty();
    Ok((
        json!({
            "kind": rec.kind,
            "polys": rec.polys.len(),
            "points": rec.points.len(),
            "evaluations": rec.polys.len() * rec.points.len(),
            "ok": ok,
            "failures": failures.iter().map(describe).collect::<Vec<_>>(),
        }),
        ok,
    ))
}

/// The run record around a command result.
pub fn run_record(command: &str, seed: Option<u64>, input_hash: Option<String>, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "seed": seed,
        "input_hash": input_hash,
        "result": result,
    })
}

pub fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("JSON value serializes")
    } else {
        serde_json::to_string(v).expect("JSON value serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_records_unwrap() {
        let inst = cmd_gen("chain:4", 0).unwrap();
        let wrapped = render(&run_record("gen", Some(0), None, inst.clone()), false);
        let a = load_panel(&wrapped, "x").unwrap();
        let b = load_panel(&render(&inst, false), "x").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn t_must_lie_in_the_panel() {
        let p = load_panel(&render(&cmd_gen("chain:4", 0).unwrap(), false), "x").unwrap();
        let f = Fibre::new(p).unwrap();
        assert!(choose_t(&f, Some("0,1,2,3"), 0).is_ok());
        let e = choose_t(&f, Some("0,1,4,3"), 0).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_PRECONDITION);
        assert!(choose_t(&f, Some("0,1"), 0).is_err());
    }

    #[test]
    fn equations_round_trip() {
        let text = render(&cmd_gen("general:6:2", 1).unwrap(), false);
        for kind in [EqKind::Monomial, EqKind::MonomialAffine, EqKind::ChainEnd, EqKind::Rank4, EqKind::Scroll] {
            let p = load_panel(&text, "x").unwrap();
            let eq = match cmd_equations(p.clone(), kind, None, 0, 3) {
                Ok(v) => v,
                Err(e) => {
                    assert_eq!(e.exit_code(), EXIT_PRECONDITION, "{kind:?}: {e}");
                    continue;
                }
            };
            let rec = load_equations(&render(&eq, false), "eq").unwrap();
            let (_, ok) = cmd_verify(&rec, &p).unwrap();
            assert!(ok, "{kind:?}");
        }
    }

    #[test]
    fn hashes_are_hex() {
        assert_eq!(input_hash(b"").len(), 64);
    }
}
