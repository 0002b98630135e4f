//! Acceptance suite: one PASS/FAIL line per criterion, exact checks only.
//!
//! Runs as a plain binary so the lines always reach the test output. A
//! criterion listed in `KNOWN_UNATTAINABLE` is reported but does not fail
//! the run; everything else must pass.

use std::process::{Command, Stdio};
use std::time::Instant;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use fibrekit::configmodel::{rescale_panel, unit_of, FnVec, Panel};
use fibrekit::equations::{
    adjoint_coordinates, all_rank_bounded_relations, coordinates_nonzero, monomial_relations, mu00_split,
    rank4_quadrics, scroll_equations, sl2_basis, EquationSet,
};
use fibrekit::exactlin::{int, kernel, nilpotent_partition, BilinearForm, Mat, Scalar};
use fibrekit::fibre::Fibre;
use fibrekit::filtration::{compute_filtration, rescaling_law_check, FiltrationError};
use fibrekit::generate::{generate, GenSpec};
use fibrekit::liealg::{center_and_blocks, classify, generate_lie_algebra, torelli_index, triangular, Classification};
use fibrekit::nilorbit::{
    check_weight_filtrations, loop_exponents, minus_jordan, plus_jordan, random_panel_element, sample_strata,
    GradedPartition,
};
use fibrekit::partition::Partition;
use fibrekit::poly::{monomials_of_degree, Poly};
use fibrekit::springerchar::{
    at_one, forget_grading, kostka_foulkes, macdonald_value, orbit_dim, springer_fibre_dim,
};
use fibrekit_cli::{choose_t, cmd_verify, load_equations, render};

/// Criteria that cannot hold as stated; each has a ledger entry explaining why.
const KNOWN_UNATTAINABLE: &[usize] = &[9];

struct Outcome {
    pass: bool,
    detail: String,
    /// Computed values, compared across runs by the determinism criterion.
    digest: Value,
}

fn outcome(pass: bool, detail: impl Into<String>, digest: Value) -> Outcome {
    Outcome { pass, detail: detail.into(), digest }
}

fn fibre(spec: &str, seed: u64) -> Fibre {
    Fibre::new(generate(&spec.parse().unwrap(), seed).unwrap()).unwrap()
}

/// Seeded mix of generated instances with `2 ≤ r+1 ≤ 5` and `d ≤ 12`.
fn corpus(n: usize, seed: u64) -> Vec<(String, Panel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let spec = match rng.gen_range(0..10) {
            0..=5 => {
                let r = rng.gen_range(1..=4);
                let d = rng.gen_range(r + 1..=12);
                GenSpec::General { d, r }
            }
            6 => GenSpec::Chain { d: rng.gen_range(2..=12) },
            7 => {
                let k = rng.gen_range(2..=4);
                GenSpec::Blocks { sizes: (0..k).map(|_| rng.gen_range(1..=3)).collect() }
            }
            8 => GenSpec::Rnc { m: rng.gen_range(2..=5) },
            _ => {
                let a = rng.gen_range(2..=5);
                let b = rng.gen_range(2..=5);
                GenSpec::Union(vec![GenSpec::Chain { d: a }, GenSpec::General { d: b + 1, r: 1 }])
            }
        };
        let s: u64 = rng.gen();
        match generate(&spec, s) {
            Ok(p) => out.push((format!("{spec}@{s}"), p)),
            Err(e) => panic!("corpus generation failed for {spec}: {e}"),
        }
    }
    out
}

fn pointwise(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Rank of all products of at most `i` panel basis functions.
fn monomial_span_rank(p: &Panel, i: u32) -> usize {
    let basis = p.adapted_basis();
    let d = p.d();
    let mut rows = Vec::new();
    for k in 0..=i {
        for e in monomials_of_degree(basis.len(), k) {
            let mut v = vec![Scalar::one(); d];
            for (f, &m) in basis.iter().zip(&e) {
                for _ in 0..m {
                    v = pointwise(&v, f.values());
                }
            }
            rows.push(v);
        }
    }
    Mat::from_rows(d, &rows).unwrap().rank()
}

fn c1_filtration_oracle() -> Outcome {
    let mut bad = Vec::new();
    let mut dims = Vec::new();
    for (name, p) in corpus(200, 1) {
        let f = compute_filtration(&p);
        for i in 1..=f.length() + 1 {
            if f.step(i).dim() != monomial_span_rank(&p, i as u32) {
                bad.push(format!("{name} i={i}"));
            }
        }
        dims.push(json!(f.dims()));
    }
    outcome(bad.is_empty(), format!("200 instances, mismatches {bad:?}"), json!(dims))
}

fn c2_orthogonal_decomposition() -> Outcome {
    let mut bad = Vec::new();
    let mut digest = Vec::new();
    for (name, p) in corpus(200, 1) {
        let r = p.r();
        let f = Fibre::new(p).unwrap();
        let g = f.ambient();
        let q = g.form();
        let sums = g.summands();
        for a in 0..sums.len() {
            for b in a + 1..sums.len() {
                for u in sums[a].vectors() {
                    for v in sums[b].vectors() {
                        if !q.eval(&u, &v).is_zero() {
                            bad.push(format!("{name}: H{a} not orthogonal to H{b}"));
                        }
                    }
                }
            }
        }
        let dims = g.dims();
        if dims.iter().sum::<usize>() != f.d() || dims[0] != r + 1 {
            bad.push(format!("{name}: summand dims {dims:?}"));
        }
        digest.push(json!(dims));
    }
    // the diagonal form (1,-1,-1,1) degenerates on span(1,t) of a four-point chain
    let chain = generate(&GenSpec::Chain { d: 4 }, 0).unwrap();
    let weights = BilinearForm::diagonal(&[int(1), int(-1), int(-1), int(1)]);
    let degenerate = Fibre::with_form(chain.clone(), &weights);
    let raised = matches!(degenerate, Err(FiltrationError::DegenerateRestriction(1)));
    let t = FnVec::from_ints(&[0, 1, 2, 3]);
    let recovered = Fibre::with_form(rescale_panel(&chain, &t).unwrap(), &weights).is_ok();
    if !raised {
        bad.push(format!("degenerate form not reported: {:?}", degenerate.err()));
    }
    if !recovered {
        bad.push("rescaled chain still degenerate".into());
    }
    outcome(bad.is_empty(), format!("200 instances plus degenerate chain; problems {bad:?}"), json!(digest))
}

/// Random `s` in the panel with `1 + s` nowhere zero.
fn random_unit(f: &Fibre, rng: &mut ChaCha8Rng) -> FnVec {
    loop {
        let s = random_panel_element(f, rng, 5);
        if unit_of(f.panel(), &s).is_ok() {
            return s;
        }
    }
}

fn c3_rescaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    for (name, p) in corpus(100, 3) {
        let f = Fibre::new(p.clone()).unwrap();
        let s = random_unit(&f, &mut rng);
        for i in 1..=f.length() {
            if !rescaling_law_check(&p, &s, i).unwrap() {
                bad.push(format!("{name} i={i}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("100 instances, failures {bad:?}"), json!(bad))
}

fn c4_lie_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    let mut digest = Vec::new();
    for (name, p) in corpus(100, 4) {
        let f = Fibre::new(p).unwrap();
        let alg = generate_lie_algebra(&f).unwrap();
        let rep = center_and_blocks(&alg, &f).unwrap();
        let squares: usize = rep.weight_dims.iter().map(|w| w * w).sum();
        if rep.algebra_dim != squares {
            bad.push(format!("{name}: dim {} vs Σ dim² {squares}", rep.algebra_dim));
        }
        if rep.center_dim != rep.blocks.len() {
            bad.push(format!("{name}: center {} vs {} blocks", rep.center_dim, rep.blocks.len()));
        }
        let refines = f
            .reduction()
            .blocks()
            .iter()
            .all(|class| rep.blocks.iter().any(|b| class.iter().all(|z| b.contains(z))));
        if !refines {
            bad.push(format!("{name}: a reduction class is split by the blocks"));
        }
        let t = random_panel_element(&f, &mut rng, 10);
        let tri = triangular(&t, f.ambient()).unwrap();
        let q = f.ambient().form();
        let u: Vec<Scalar> = (0..f.d()).map(|_| int(rng.gen_range(-9..=9))).collect();
        let v: Vec<Scalar> = (0..f.d()).map(|_| int(rng.gen_range(-9..=9))).collect();
        if q.eval(&tri.plus.apply(&u), &v) != q.eval(&u, &tri.minus.apply(&v)) || tri.plus.transpose() != tri.minus {
            bad.push(format!("{name}: D⁺ and D⁻ are not adjoint"));
        }
        let tor = torelli_index(&f).unwrap();
        if tor.total_kernel_dim + 1 != rep.blocks.len() {
            bad.push(format!("{name}: ker d⁺ {} with {} blocks", tor.total_kernel_dim, rep.blocks.len()));
        }
        digest.push(json!([rep.algebra_dim, rep.center_dim, rep.blocks]));
    }
    outcome(bad.is_empty(), format!("100 instances, problems {bad:?}"), json!(digest))
}

fn general_position_corpus(n: usize, seed: u64) -> Vec<(String, Fibre)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.gen_range(1..=4);
            let d = rng.gen_range(2 * r + 1..=12);
            let s: u64 = rng.gen();
            let name = format!("general:{d}:{r}@{s}");
            (name, Fibre::new(generate(&GenSpec::General { d, r }, s).unwrap()).unwrap())
        })
        .collect()
}

fn c5_general_position() -> Outcome {
    let mut bad = Vec::new();
    let mut digest = Vec::new();
    for (k, (name, f)) in general_position_corpus(50, 5).into_iter().enumerate() {
        let alg = generate_lie_algebra(&f).unwrap();
        let class = classify(&center_and_blocks(&alg, &f).unwrap());
        if class != Classification::Simple {
            bad.push(format!("{name}: {}", class.tag()));
        }
        let tor = torelli_index(&f).unwrap();
        if !tor.is_strong() {
            bad.push(format!("{name}: Torelli index {:?}", tor.index));
        }
        let t = choose_t(&f, None, k as u64).unwrap();
        let mu00 = plus_jordan(&f, &t).unwrap().multiplicities().get(0, 0);
        let split = mu00_split(&f, 10, k as u64).unwrap();
        if mu00 != 1 || split.mu00 != 1 || split.generic_mu00 != 1 {
            bad.push(format!("{name}: μ₀₀ {mu00}, split {}, generic {}", split.mu00, split.generic_mu00));
        }
        let vanishing = f.delta_heads_vanishing();
        if !vanishing.is_empty() {
            bad.push(format!("{name}: δ heads vanish at {vanishing:?}"));
        }
        digest.push(json!([class.tag(), tor.kernel_dims, mu00]));
    }
    outcome(bad.is_empty(), format!("50 instances, problems {bad:?}"), json!(digest))
}

fn c6_partition_identities() -> Outcome {
    let mut bad = Vec::new();
    let mut digest = Vec::new();
    for (k, (name, p)) in corpus(200, 6).into_iter().enumerate() {
        let f = Fibre::new(p).unwrap();
        let t = choose_t(&f, None, k as u64).unwrap();
        let plus = plus_jordan(&f, &t).unwrap();
        let m = plus.multiplicities();
        let gp = GradedPartition::from_matrix(&m);
        let union = gp.per_level.iter().fold(Partition::empty(), |a, x| a.union(x));
        let tr = triangular(&f.to_reduced(&t).unwrap(), f.reduced()).unwrap();
        let ranks = nilpotent_partition(&tr.plus).unwrap();
        if plus.partition() != union || forget_grading(&gp) != ranks || plus.partition() != ranks {
            bad.push(format!("{name}: λ {} union {union} ranks {ranks}", plus.partition()));
        }
        let l = f.length();
        if gp.predicted_hilbert() != f.hilbert()[..l] {
            bad.push(format!("{name}: hᵖ {:?} vs {:?}", gp.predicted_hilbert(), f.hilbert()));
        }
        let mm = minus_jordan(&f, &t).unwrap().minus_multiplicities();
        if mm != m.reflected() {
            bad.push(format!("{name}: μ′ {mm:?} vs reflected {:?}", m.reflected()));
        }
        if !check_weight_filtrations(&f, &t).unwrap().orthogonal {
            bad.push(format!("{name}: weight filtrations not orthogonal"));
        }
        digest.push(json!([m, mm]));
    }
    outcome(bad.is_empty(), format!("200 (instance, t) pairs, problems {bad:?}"), json!(digest))
}

fn verify_set(set: &EquationSet, panel: &Panel) -> bool {
    let text = render(&serde_json::to_value(set.to_record()).unwrap(), false);
    let rec = load_equations(&text, "equations").unwrap();
    cmd_verify(&rec, panel).unwrap().1
}

fn c7_scroll() -> Outcome {
    let mut bad = Vec::new();
    let mut digest = Vec::new();
    for d in 5..=9 {
        let f = fibre(&format!("general:{d}:1"), d as u64);
        let t = choose_t(&f, None, 7).unwrap();
        let lambda = plus_jordan(&f, &t).unwrap().partition();
        let adj = adjoint_coordinates(&f, &t).unwrap();
        let set = scroll_equations(&adj).unwrap();
        let minors = (d - 3) * (d - 4) / 2;
        if lambda != Partition::new(vec![d - 1, 1]) || adj.lambda_hat != Partition::row(d - 2) {
            bad.push(format!("d={d}: λ {lambda} λ̂ {}", adj.lambda_hat));
        }
        if adj.names.len() != d - 2 || !coordinates_nonzero(&adj) {
            bad.push(format!("d={d}: {} coordinates", adj.names.len()));
        }
        if set.len() != minors || !set.all_vanish() || !verify_set(&set, f.panel()) {
            bad.push(format!("d={d}: {} minors, expected {minors}", set.len()));
        }
        digest.push(json!([lambda, adj.lambda_hat, set.to_record()]));
    }
    outcome(bad.is_empty(), format!("d = 5..9, problems {bad:?}"), json!(digest))
}

fn c8_quadrics() -> Outcome {
    let mut bad = Vec::new();
    let mut digest = Vec::new();
    for m in 3..=5usize {
        let f = fibre(&format!("rnc:{m}"), m as u64);
        if f.hilbert() != [m, m - 1, 1, 0] {
            bad.push(format!("m={m}: Hilbert {:?}", f.hilbert()));
        }
        let strata = sample_strata(&f, 20, m as u64).unwrap();
        let mut parts = vec![3];
        parts.extend(std::iter::repeat_n(2, m - 2));
        parts.push(1);
        let generic = strata.generic.forget_grading();
        if generic != Partition::new(parts) || strata.ambiguous {
            bad.push(format!("m={m}: generic partition {generic}"));
        }
        let q = rank4_quadrics(&f).unwrap();
        let want = (m - 1) * (m - 2) / 2;
        if q.set.len() != want || q.independent != want {
            bad.push(format!("m={m}: {} quadrics ({} independent), expected {want}", q.set.len(), q.independent));
        }
        if q.matrix_ranks.iter().any(|&r| r > 4) || !q.set.all_vanish() || !verify_set(&q.set, f.panel()) {
            bad.push(format!("m={m}: ranks {:?}", q.matrix_ranks));
        }
        if m == 3 {
            // the conics through the six points, from the evaluation matrix
            let mons = monomials_of_degree(3, 2);
            let rows: Vec<Vec<Scalar>> = q
                .set
                .coordinates
                .iter()
                .map(|x| mons.iter().map(|e| Poly::monomial(3, e.clone(), Scalar::one()).eval(x)).collect())
                .collect();
            let conics = kernel(&Mat::from_rows(mons.len(), &rows).unwrap());
            let ours: Vec<Scalar> = mons.iter().map(|e| q.set.polys[0].coefficient(e)).collect();
            if conics.dim() != 1 || !conics.contains(&ours) {
                bad.push(format!("m=3: {} conics through the points", conics.dim()));
            }
        }
        digest.push(json!([f.hilbert(), generic, q.set.to_record()]));
    }
    outcome(bad.is_empty(), format!("m = 3, 4, 5, problems {bad:?}"), json!(digest))
}

const CERT_SPECS: &[&str] = &[
    "chain:4",
    "chain:6",
    "general:6:1",
    "general:9:1",
    "general:12:1",
    "general:7:2",
    "general:8:2",
    "general:10:2",
    "general:9:3",
    "rnc:3",
    "rnc:4",
    "blocks:2:3",
    "general:4:1+general:4:1",
];

fn c9_certificates() -> Outcome {
    let mut unverified = Vec::new();
    let mut short = Vec::new();
    let mut digest = Vec::new();
    let mut sets = 0;
    for (k, spec) in CERT_SPECS.iter().enumerate() {
        let f = fibre(spec, k as u64);
        let panel = f.panel();
        let t = choose_t(&f, None, k as u64).unwrap();
        let b = sl2_basis(&f, &t).unwrap();
        let mono = monomial_relations(&b, 4).unwrap();
        let chain_end = all_rank_bounded_relations(&b).unwrap();
        let scroll = scroll_equations(&adjoint_coordinates(&f, &t).unwrap()).unwrap();
        let mut all: Vec<(String, &EquationSet)> =
            vec![("monomial-affine".into(), &mono.affine), ("monomial".into(), &mono.homogeneous), ("scroll".into(), &scroll)];
        for ((q, p), s) in &chain_end {
            all.push((format!("chain-end({q},{p})"), s));
            let mu = b.heads_of(*q, *p).count();
            let degrees_ok = s.polys.iter().all(|g| g.is_homogeneous() && g.degree() == Some(*p as u32 + 2));
            if s.rank() < mu || !degrees_ok {
                short.push(format!("{spec} (q,p)=({q},{p}): rank {} < μ {mu}", s.rank()));
            }
        }
        for (name, s) in &all {
            sets += 1;
            if !verify_set(s, panel) {
                unverified.push(format!("{spec} {name}"));
            }
        }
        digest.push(json!(all.iter().map(|(n, s)| json!([n, s.to_record()])).collect::<Vec<_>>()));
    }
    let pass = unverified.is_empty() && short.is_empty();
    let detail = format!(
        "{sets} sets on {} instances; verification failures {unverified:?}; rank below multiplicity {short:?}",
        CERT_SPECS.len()
    );
    outcome(pass, detail, json!(digest))
}

fn c10_loop_exponents() -> Outcome {
    let mut bad = Vec::new();
    let mut digest = Vec::new();
    for (k, (name, p)) in corpus(200, 10).into_iter().enumerate() {
        let f = Fibre::new(p).unwrap();
        let t = choose_t(&f, None, k as u64).unwrap();
        let plus = plus_jordan(&f, &t).unwrap();
        match loop_exponents(&plus, f.hilbert()) {
            Ok(data) => {
                let hmax = *f.hilbert().iter().max().unwrap() as i64;
                let bound = 2 * hmax * f.length() as i64;
                if data.traces.iter().sum::<i64>() != 0 || data.exponents.iter().any(|a| a.abs() > bound) {
                    bad.push(format!("{name}: {data:?}"));
                }
                digest.push(json!(data.exponents));
            }
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    for d in 3..=10 {
        let f = fibre(&format!("chain:{d}"), 0);
        let t = FnVec::from_ints(&(0..d as i64).collect::<Vec<_>>());
        let data = loop_exponents(&plus_jordan(&f, &t).unwrap(), f.hilbert()).unwrap();
        if data.exponents != vec![2; d - 2] {
            bad.push(format!("chain:{d}: {:?}", data.exponents));
        }
    }
    outcome(bad.is_empty(), format!("200 samples plus chains d = 3..10, problems {bad:?}"), json!(digest))
}

/// Number of semistandard fillings, by cell-by-cell backtracking.
fn kostka_brute(lambda: &Partition, mu: &Partition) -> u64 {
    fn rec(cells: &[(usize, usize)], k: usize, grid: &mut [Vec<usize>], left: &mut [usize]) -> u64 {
        if k == cells.len() {
            return left.iter().all(|&x| x == 0) as u64;
        }
        let (i, j) = cells[k];
        let mut total = 0;
        for v in 1..=left.len() {
            if left[v - 1] == 0 || (j > 0 && grid[i][j - 1] > v) || (i > 0 && grid[i - 1][j] >= v) {
                continue;
            }
            left[v - 1] -= 1;
            grid[i][j] = v;
            total += rec(cells, k + 1, grid, left);
            grid[i][j] = 0;
            left[v - 1] += 1;
        }
        total
    }
    if lambda.weight() != mu.weight() {
        return 0;
    }
    let cells: Vec<(usize, usize)> =
        lambda.parts().iter().enumerate().flat_map(|(i, &len)| (0..len).map(move |j| (i, j))).collect();
    let mut grid: Vec<Vec<usize>> = lambda.parts().iter().map(|&len| vec![0; len]).collect();
    let mut left = mu.parts().to_vec();
    rec(&cells, 0, &mut grid, &mut left)
}

/// Number of standard tableaux, by the hook length formula.
fn hook_count(lambda: &Partition) -> u64 {
    let conj = lambda.conjugate();
    let mut hooks: u128 = 1;
    for (i, &len) in lambda.parts().iter().enumerate() {
        for j in 0..len {
            hooks *= (len - j + conj.part(j) - i - 1) as u128;
        }
    }
    let fact: u128 = (1..=lambda.weight() as u128).product();
    (fact / hooks) as u64
}

fn c11_springer() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=10 {
        for mu in Partition::all(n) {
            let lhs: usize = mu.parts().iter().enumerate().map(|(k, &m)| (2 * k + 1) * m).sum::<usize>() - n;
            if lhs != 2 * springer_fibre_dim(&mu) || orbit_dim(&mu, n).unwrap() + lhs + n != n * n {
                bad.push(format!("dimension identity at {mu}"));
            }
        }
    }
    for n in 1..=6 {
        for lambda in Partition::all(n) {
            for mu in Partition::all(n) {
                let k = kostka_foulkes(&lambda, &mu).unwrap();
                if at_one(&k) != kostka_brute(&lambda, &mu) {
                    bad.push(format!("K_{lambda}{mu}(1) = {} vs {}", at_one(&k), kostka_brute(&lambda, &mu)));
                }
                if !k.is_empty() && !lambda.dominates(&mu) {
                    bad.push(format!("K_{lambda}{mu} nonzero outside dominance"));
                }
                if lambda == mu && k != vec![1] {
                    bad.push(format!("K_{lambda}{lambda} = {k:?}"));
                }
            }
        }
    }
    let mut digest = Vec::new();
    for n in 1..=5 {
        for mu in Partition::all(n) {
            let v = macdonald_value(&mu, n).unwrap();
            let b = springer_fibre_dim(&mu);
            for lambda in Partition::all(n) {
                if at_one(&v.coefficient(&lambda)) != kostka_brute(&lambda, &mu) {
                    bad.push(format!("q=1 multiplicity of {lambda} in {mu}"));
                }
            }
            let top = v.coefficient(&mu);
            if v.in_degree(b) != vec![mu.clone()] || top.get(b) != Some(&1) || v.degree() != Some(b) {
                bad.push(format!("top degree of {mu}: {:?}", v.in_degree(b)));
            }
            if v.in_degree(0) != vec![Partition::row(n)] {
                bad.push(format!("degree 0 of {mu}: {:?}", v.in_degree(0)));
            }
            // total dimension of the cohomology: n! / Π μ_k!
            let dim: u64 = v.terms.iter().map(|t| at_one(&t.poly_q) * hook_count(&t.lambda)).sum();
            let fact = |k: usize| (1..=k as u64).product::<u64>();
            let want = fact(n) / mu.parts().iter().map(|&k| fact(k)).product::<u64>();
            if dim != want {
                bad.push(format!("dim H•(B_{mu}) = {dim}, expected {want}"));
            }
            digest.push(serde_json::to_value(&v).unwrap());
        }
    }
    outcome(bad.is_empty(), format!("n ≤ 10 / 6 / 5, problems {bad:?}"), json!(digest))
}

fn bin(args: &[&str], stdin: Option<&str>) -> (i32, String) {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_fibrekit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(s) = stdin {
        // the child may exit on a usage error before reading its input
        let _ = child.stdin.take().unwrap().write_all(s.as_bytes());
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

/// CLI pipeline over a few instances; returns the concatenated outputs.
fn cli_run(dir: &std::path::Path) -> Result<String, String> {
    let mut all = String::new();
    for (k, spec) in ["general:8:2", "chain:5", "rnc:4", "blocks:2:3", "chain:3+general:4:1"].iter().enumerate() {
        let seed = k.to_string();
        let (code, inst) = bin(&["gen", spec, "--seed", &seed], None);
        if code != 0 {
            return Err(format!("gen {spec} exited {code}"));
        }
        let inst_path = dir.join(format!("inst{k}.json"));
        std::fs::write(&inst_path, &inst).unwrap();
        all.push_str(&inst);
        for args in [
            &["analyze", "--input", "-"][..],
            &["jordan", "--samples", "5", "--input", "-", "--seed", &seed],
            &["loop", "--input", "-", "--seed", &seed],
            &["mu00", "--samples", "5", "--input", "-", "--seed", &seed],
        ] {
            let a = args.to_vec();
            let (code, out) = bin(&a, Some(&inst));
            all.push_str(&format!("{code}:{out}"));
        }
        for kind in ["monomial", "chain-end", "scroll", "rank4"] {
            let (code, eq) = bin(&["equations", kind, "--input", "-", "--seed", &seed, "--degree-cap", "3"], Some(&inst));
            all.push_str(&format!("{code}:{eq}"));
            if code != 0 {
                continue;
            }
            let (vcode, report) = bin(&["verify", "--equations", "-", "--input", inst_path.to_str().unwrap()], Some(&eq));
            if vcode != 0 {
                return Err(format!("verify of {kind} on {spec} exited {vcode}: {report}"));
            }
            all.push_str(&report);
        }
    }
    all.push_str(&bin(&["macdonald", "--mu", "2,2,1"], None).1);
    Ok(all)
}

fn c12_determinism(digests: &[Value]) -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let runs = (cli_run(&dir), cli_run(&dir));
    let cli_same = match &runs {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    // recompute the library-level suite outputs for a second run
    let again = [c6_partition_identities().digest, c7_scroll().digest, c8_quadrics().digest, c10_loop_exponents().digest];
    let first = [&digests[5], &digests[6], &digests[7], &digests[9]];
    let lib_same = again.iter().zip(first).all(|(a, b)| render(a, false) == render(b, false));
    let detail = match &runs {
        (Ok(a), Ok(_)) => format!("CLI pipeline {} bytes identical: {cli_same}; library outputs identical: {lib_same}", a.len()),
        (Err(e), _) | (Ok(_), Err(e)) => format!("CLI pipeline failed: {e}"),
    };
    outcome(cli_same && lib_same, detail, Value::Null)
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("filtration oracle", c1_filtration_oracle),
        ("orthogonal decomposition", c2_orthogonal_decomposition),
        ("rescaling covariance", c3_rescaling),
        ("Lie structure", c4_lie_structure),
        ("general position", c5_general_position),
        ("partition identities", c6_partition_identities),
        ("classical scroll", c7_scroll),
        ("complete-intersection quadrics", c8_quadrics),
        ("equation certificates", c9_certificates),
        ("loop exponents", c10_loop_exponents),
        ("Springer combinatorics", c11_springer),
    ];
    let mut digests = Vec::new();
    let mut unexpected = Vec::new();
    let mut report = |n: usize, name: &str, o: &Outcome, secs: f64| {
        let known = KNOWN_UNATTAINABLE.contains(&n);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known, see decisions ledger)",
            (false, false) => "FAIL",
        };
        println!("criterion {n:>2} [{tag}] {name} ({secs:.1}s): {}", o.detail);
        if !o.pass && !known {
            unexpected.push(n);
        }
    };
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        report(i + 1, name, &o, start.elapsed().as_secs_f64());
        digests.push(o.digest);
    }
    let start = Instant::now();
    let o = c12_determinism(&digests);
    report(12, "determinism", &o, start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("acceptance failures: criteria {unexpected:?}");
        std::process::exit(1);
    }
}
