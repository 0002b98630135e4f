//! Property tests of structural invariants over generated instances.

use num::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fibrekit::configmodel::FnVec;
use fibrekit::equations::{
    adjoint_coordinates, all_rank_bounded_relations, coordinates_nonzero, monomial_relations, sl2_basis,
};
use fibrekit::exactlin::{int, kernel, nilpotent_partition, Mat, Scalar, Subspace};
use fibrekit::fibre::Fibre;
use fibrekit::generate::{generate, GenSpec};
use fibrekit::liealg::triangular;
use fibrekit::nilorbit::{
    bigrading, loop_exponents, minus_jordan, plus_jordan, random_panel_element, truncate, GradedPartition,
};
use fibrekit::partition::Partition;
use fibrekit::springerchar::{
    at_one, charge, forget_grading, kostka_foulkes, macdonald_value, orbit_dim, springer_fibre_dim,
};

fn spec_strategy() -> impl Strategy<Value = GenSpec> {
    prop_oneof![
        (1usize..=3).prop_flat_map(|r| (r + 1..=10usize).prop_map(move |d| GenSpec::General { d, r })),
        (2usize..=9).prop_map(|d| GenSpec::Chain { d }),
        prop::collection::vec(1usize..=3, 2..=3).prop_map(|sizes| GenSpec::Blocks { sizes }),
        (2usize..=4).prop_map(|m| GenSpec::Rnc { m }),
        ((2usize..=4), (2usize..=4)).prop_map(|(a, b)| GenSpec::Union(vec![
            GenSpec::Chain { d: a },
            GenSpec::General { d: b + 1, r: 1 }
        ])),
    ]
}

fn general_strategy() -> impl Strategy<Value = GenSpec> {
    (1usize..=3).prop_flat_map(|r| (r + 2..=10usize).prop_map(move |d| GenSpec::General { d, r }))
}

/// An instance with a panel function that is not constant on the reduction.
fn instance() -> impl Strategy<Value = (Fibre, FnVec)> {
    instance_of(spec_strategy())
}

fn instance_of(specs: impl Strategy<Value = GenSpec>) -> impl Strategy<Value = (Fibre, FnVec)> {
    (specs, any::<u64>()).prop_filter_map("no instance", |(spec, seed)| {
        let f = Fibre::new(generate(&spec, seed).ok()?).ok()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..20)
            .map(|_| random_panel_element(&f, &mut rng, 10))
            .find(|t| !f.to_reduced(t).unwrap().is_constant())
            .map(|t| (f, t))
    })
}

fn partition_strategy() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1usize..=4, 1..=4).prop_map(Partition::new)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn kernel_is_annihilated(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 1..=4)) {
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        let m = Mat::from_rows(4, &rows).unwrap();
        let k = kernel(&m);
        prop_assert_eq!(k.dim() + m.rank(), 4);
        for v in k.vectors() {
            prop_assert!(m.apply(&v).iter().all(Zero::is_zero));
        }
        let s = Subspace::row_space(&m);
        prop_assert_eq!(Subspace::from_rows(4, &s.vectors()).unwrap(), s);
    }

    #[test]
    fn hilbert_vector_sums_to_d((f, _t) in instance()) {
        prop_assert_eq!(f.hilbert().iter().sum::<usize>(), f.d());
        prop_assert_eq!(f.ambient().dims().iter().sum::<usize>(), f.d());
        prop_assert_eq!(f.hilbert()[0], f.panel().r() + 1);
        prop_assert_eq!(*f.hilbert().last().unwrap(), f.d() - f.d_prime());
    }

    #[test]
    fn triangular_parts_are_adjoint((f, t) in instance()) {
        let tri = triangular(&t, f.ambient()).unwrap();
        prop_assert_eq!(tri.plus.transpose(), tri.minus.clone());
        prop_assert_eq!(&(&(&tri.minus + &tri.zero) + &tri.plus), &tri.full);
    }

    #[test]
    fn graded_jordan_identities((f, t) in instance()) {
        let plus = plus_jordan(&f, &t).unwrap();
        let m = plus.multiplicities();
        let gp = GradedPartition::from_matrix(&m);
        let tr = triangular(&f.to_reduced(&t).unwrap(), f.reduced()).unwrap();
        prop_assert_eq!(forget_grading(&gp), nilpotent_partition(&tr.plus).unwrap());
        prop_assert_eq!(&gp.predicted_hilbert()[..], &f.hilbert()[..f.length()]);
        prop_assert!(m.is_upper_triangular());
        prop_assert!(gp.fits(f.hilbert()));
        prop_assert_eq!(minus_jordan(&f, &t).unwrap().minus_multiplicities(), m.reflected());
        prop_assert!(bigrading(&plus).in_range());
        let lp = loop_exponents(&plus, f.hilbert()).unwrap();
        prop_assert_eq!(lp.traces.iter().sum::<i64>(), 0);
    }

    /// Parts of size one in the truncated partition come from the chains of
    /// `D⁻` with one box above degree 0 plus the points beyond the reduction.
    #[test]
    fn ones_in_truncated_partition((f, t) in instance()) {
        let l = f.length();
        prop_assume!(l >= 2);
        let mm = minus_jordan(&f, &t).unwrap().minus_multiplicities();
        let trunc = truncate(&f, &t).unwrap();
        let predicted = mm.get(l - 2, 0) + (1..l).map(|p| mm.get(l - 1, p)).sum::<usize>() + f.hilbert()[l];
        prop_assert_eq!(trunc.truncated.multiplicity(1), predicted);
        let r = f.panel().r();
        prop_assert_eq!(trunc.erased, r + 1);
        prop_assert_eq!(trunc.truncated.weight(), f.d() - r - 1);
        let mu00 = plus_jordan(&f, &t).unwrap().multiplicities().get(0, 0);
        prop_assert_eq!(trunc.s_prime(), trunc.s() - mu00);
    }

    #[test]
    fn sl2_relations((f, t) in instance()) {
        prop_assume!(f.d_prime() <= 9);
        let b = sl2_basis(&f, &t).unwrap();
        let m = plus_jordan(&f, &t).unwrap().multiplicities();
        for ((q, p), s) in all_rank_bounded_relations(&b).unwrap() {
            let mu = m.get(q, p);
            prop_assert_eq!(s.len(), mu);
            // at (0,0) one relation restates the constant function and vanishes
            let expected = if (q, p) == (0, 0) { mu - 1 } else { mu };
            prop_assert_eq!(s.rank(), expected, "({}, {})", q, p);
            prop_assert!(s.all_vanish());
        }
        let r = monomial_relations(&b, 3).unwrap();
        prop_assert!(r.affine.all_vanish() && r.homogeneous.all_vanish());
    }

    #[test]
    fn adjoint_coordinates_never_all_vanish((f, t) in instance_of(general_strategy())) {
        let adj = adjoint_coordinates(&f, &t).unwrap();
        prop_assert_eq!(adj.names.len(), f.d() - f.panel().r() - 1);
        prop_assert!(coordinates_nonzero(&adj));
    }

    #[test]
    fn partition_conjugation(mu in partition_strategy(), nu in partition_strategy()) {
        prop_assert_eq!(mu.conjugate().conjugate(), mu.clone());
        if mu.weight() == nu.weight() {
            prop_assert_eq!(mu.dominates(&nu), nu.conjugate().dominates(&mu.conjugate()));
        }
    }

    #[test]
    fn springer_dimensions(mu in partition_strategy()) {
        let n = mu.weight();
        prop_assert_eq!(orbit_dim(&mu, n).unwrap() + 2 * springer_fibre_dim(&mu), n * n - n);
        let v = macdonald_value(&mu, n).unwrap();
        prop_assert!(v.degree().unwrap() <= springer_fibre_dim(&mu));
        for t in &v.terms {
            prop_assert!(t.lambda.dominates(&mu));
        }
    }

    #[test]
    fn charge_of_permutations(perm in Just((1..=5usize).collect::<Vec<_>>()).prop_shuffle()) {
        let c = charge(&perm);
        prop_assert!(c <= 10);
        let decreasing = perm.windows(2).all(|w| w[0] > w[1]);
        prop_assert_eq!(c == 0, decreasing);
        let k = kostka_foulkes(&Partition::row(5), &Partition::column(5)).unwrap();
        prop_assert_eq!(at_one(&k), 1);
    }
}
