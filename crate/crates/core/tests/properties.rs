use std::collections::HashSet;

use coarse_lab::actions::{
    self, boundary_moves_witness, verify_boundary_witness, ActionSpec, BallSpec, BoundaryDirection, CycleVerdict,
    IsometryFixedPointVerdict,
};
use coarse_lab::coarse::{self, PointMap, ScalarFunction};
use coarse_lab::cone::{cone_distance_lower, BaseGraph, ConeGrid, ConePoint, ConeSpace, LambdaFunction};
use coarse_lab::odometer::{self, odometer_iterate, odometer_step, BoundaryWord};
use coarse_lab::spaces::{
    ball_cardinality, reduce_word, reduced_words_of_length, FreeWord, LatticePoint, Letter, Point, SpaceHandle,
    TreeVertex,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn lattice_point(rank: usize) -> impl Strategy<Value = LatticePoint> {
    prop::collection::vec(-30i64..=30, rank).prop_map(LatticePoint::new)
}

fn word(max_len: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..=max_len).prop_map(reduce_word)
}

fn vertex(max_depth: usize) -> impl Strategy<Value = TreeVertex> {
    prop::collection::vec(any::<bool>(), 0..=max_depth).prop_map(TreeVertex::from_lsb_first)
}

fn boundary(precision: usize) -> impl Strategy<Value = BoundaryWord> {
    prop::collection::vec(any::<bool>(), precision).prop_map(|b| BoundaryWord::new(b).unwrap())
}

fn check_metric(s: &SpaceHandle, x: &Point, y: &Point, z: &Point) -> Result<(), TestCaseError> {
    let d = |a: &Point, b: &Point| s.distance(a, b).unwrap();
    prop_assert_eq!(d(x, x), 0.0);
    prop_assert_eq!(d(x, y), d(y, x));
    prop_assert_eq!(d(x, y) == 0.0, x == y);
    prop_assert!(d(x, z) <= d(x, y) + d(y, z));
    Ok(())
}

fn tree_walk_distance(a: &TreeVertex, b: &TreeVertex) -> u64 {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut d = 0;
    while a != b {
        if a.depth() >= b.depth() {
            a = a.parent().unwrap();
        } else {
            b = b.parent().unwrap();
        }
        d += 1;
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lattice_metric_axioms(x in lattice_point(3), y in lattice_point(3), z in lattice_point(3)) {
        check_metric(&SpaceHandle::integer_lattice(3), &x.into(), &y.into(), &z.into())?;
    }

    #[test]
    fn custom_generator_metric_axioms(x in lattice_point(2), y in lattice_point(2), z in lattice_point(2)) {
        let gens = vec![LatticePoint::new(vec![1, 0]), LatticePoint::new(vec![1, 1]), LatticePoint::new(vec![0, 3])];
        let s = SpaceHandle::lattice_with_generators(2, false, gens).unwrap();
        let small = |p: &LatticePoint| LatticePoint::new(p.coords.iter().map(|c| c / 6).collect());
        check_metric(&s, &small(&x).into(), &small(&y).into(), &small(&z).into())?;
    }

    #[test]
    fn free_group_metric_axioms(x in word(12), y in word(12), z in word(12)) {
        check_metric(&SpaceHandle::free_group(), &x.into(), &y.into(), &z.into())?;
    }

    #[test]
    fn free_group_laws(x in word(15), y in word(15), z in word(15)) {
        prop_assert!(x.multiply(&x.inverse()).is_empty());
        prop_assert_eq!(x.multiply(&y).multiply(&z), x.multiply(&y.multiply(&z)));
        prop_assert_eq!(reduce_word(x.letters().iter().copied()), x.clone());
        let text = x.to_string();
        prop_assert_eq!(text.parse::<FreeWord>().unwrap(), x);
    }

    #[test]
    fn tree_metric_and_gromov_product(x in vertex(14), y in vertex(14), z in vertex(14)) {
        check_metric(&SpaceHandle::binary_tree(), &x.clone().into(), &y.clone().into(), &z.into())?;
        let d = tree_walk_distance(&x, &y);
        prop_assert_eq!(x.tree_distance(&y), d);
        prop_assert_eq!(odometer::gromov_product(&x, &y), odometer::gromov_product_from_distance(&x, &y, d));
    }

    #[test]
    fn odometer_value_law(v in vertex(20)) {
        let next = odometer_step(&v);
        if v.is_root() {
            prop_assert_eq!(next.to_string(), "(0)");
        } else {
            prop_assert_eq!(next.value(), v.value() + 1);
            let all_ones = v.bits().iter().all(|&b| b);
            prop_assert_eq!(next.depth(), v.depth() + usize::from(all_ones));
        }
    }

    #[test]
    fn odometer_semigroup_law(v in vertex(10), m in 0u64..200, n in 0u64..200) {
        prop_assert_eq!(odometer_iterate(&odometer_iterate(&v, n), m), odometer_iterate(&v, m + n));
    }

    #[test]
    fn boundary_ultrametric(x in boundary(12), y in boundary(12), z in boundary(12)) {
        let d = |a: &BoundaryWord, b: &BoundaryWord| odometer::boundary_distance(a, b).unwrap().upper();
        prop_assert!(d(&x, &z) <= d(&x, &y).max(d(&y, &z)));
        prop_assert_eq!(d(&x, &y), d(&y, &x));
    }

    #[test]
    fn boundary_advance_is_additive(x in boundary(16), m in 0u64..100_000, n in 0u64..100_000) {
        let (m, n) = (BigUint::from(m), BigUint::from(n));
        let two_steps = x.advance(&m).advance(&n);
        let one_step = x.advance(&(m + n));
        prop_assert_eq!(two_steps.bits(), one_step.bits());
        let (stepped, advanced) = (x.step(), x.advance(&BigUint::from(1u32)));
        prop_assert_eq!(stepped.bits(), advanced.bits());
    }

    #[test]
    fn minimality_witness_verifies(x in boundary(40), y in boundary(40), n in 1usize..39) {
        let w = odometer::minimality_witness(&x, &y, n).unwrap();
        prop_assert!(odometer::verify_witness(&x, &y, n, &w));
        let d = odometer::boundary_distance(&x.advance(&w), &y).unwrap();
        prop_assert!(d.upper() <= (-(n as f64) - 1.0).exp2());
    }

    #[test]
    fn cone_metric_on_grid(
        a in (0usize..12, 0usize..5),
        b in (0usize..12, 0usize..5),
        c in (0usize..12, 0usize..5),
    ) {
        let space = small_cone();
        let hs = space.grid().heights().to_vec();
        let p = |(v, r): (usize, usize)| ConePoint::new(v, hs[r]);
        let (x, y, z) = (p(a), p(b), p(c));
        let d = |u: &ConePoint, v: &ConePoint| space.distance_upper(u, v).unwrap();
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &y) == 0.0, x == y);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        prop_assert!(cone_distance_lower(&x, &y) <= d(&x, &y));
    }

    #[test]
    fn lambda_length_refinement(v in 0usize..12, w in 0usize..12, r in 1usize..4) {
        let space = small_cone();
        let hs = space.grid().heights().to_vec();
        // Vertical path with an inserted midpoint keeps its length.
        let coarse_path = [ConePoint::new(v, hs[r]), ConePoint::new(v, hs[r + 1])];
        let fine = space.grid().refined().unwrap();
        let mid = *fine.heights().iter().find(|&&h| h > hs[r] && h < hs[r + 1]).unwrap();
        let fine_space = ConeSpace::new(fine, LambdaFunction::Linear);
        let refined_path = [coarse_path[0], ConePoint::new(v, mid), coarse_path[1]];
        prop_assert!(fine_space.lambda_length(&refined_path).unwrap() >= space.lambda_length(&coarse_path).unwrap());
        // Constant height: λ(t)·d(x, y).
        let flat = [ConePoint::new(v, hs[r]), ConePoint::new(w, hs[r])];
        let expected = hs[r] * space.grid().base().distance(v, w);
        prop_assert_eq!(space.lambda_length(&flat).unwrap(), expected);
    }

    #[test]
    fn composition_bound(a in 1i64..4, b in 1i64..4, shift in -5i64..5) {
        let z = SpaceHandle::integer_lattice(1);
        let f = PointMap::new("f", move |p| Ok(p.as_lattice()?.scale(a).into()));
        let g = PointMap::new("g", move |p| Ok(p.as_lattice()?.scale(b).add(&LatticePoint::new(vec![shift])).into()));
        let radii = [1.0, 2.0, 3.0];
        let sf = coarse::bornologous_profile(&f, &z, &z, &radii, 12.0).unwrap();
        let gf = coarse::bornologous_profile(&g.after(&f), &z, &z, &radii, 12.0).unwrap();
        let inner: Vec<f64> = sf.rows.iter().map(|r| r.value).collect();
        let sg = coarse::bornologous_profile(&g, &z, &z, &inner, 12.0 * a as f64).unwrap();
        for (row, outer) in gf.rows.iter().zip(&inner) {
            prop_assert!(row.value <= sg.value_at(*outer).unwrap());
        }
    }

    #[test]
    fn cyclic_orbits_close_up(m in 1i64..40, start in 0i64..40) {
        let s = SpaceHandle::integer_lattice(1);
        let x0: Point = LatticePoint::new(vec![start % m]).into();
        let v = actions::detect_coarse_fixed_point_finite(&ActionSpec::cyclic(m).unwrap(), &s, &x0, 200).unwrap();
        match v {
            CycleVerdict::Cycle { m: found, n, orbit } => {
                prop_assert_eq!((found, n), (m as u64, 0));
                let members: HashSet<Point> = orbit.into_iter().collect();
                let mut y = x0.clone();
                for _ in 0..200 {
                    y = LatticePoint::new(vec![(y.as_lattice().unwrap().coords[0] + 1) % m]).into();
                    prop_assert!(members.contains(&y));
                }
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn orbit_record_consistency(vx in -3i64..=3, vy in -3i64..=3, horizon in 0u64..40) {
        let s = SpaceHandle::integer_lattice(2);
        let v = LatticePoint::new(vec![vx, vy]);
        let action = ActionSpec::translation(v.clone());
        let x0 = s.basepoint().clone();
        let rec = actions::orbit(&action, &s, &x0, horizon).unwrap();
        for (p, &t) in rec.points.iter().zip(&rec.first_times) {
            prop_assert_eq!(p.as_lattice().unwrap(), &v.scale(t as i64));
        }
        let max = rec.points.iter().map(|p| s.distance(&x0, p).unwrap()).fold(0.0, f64::max);
        prop_assert_eq!(rec.max_displacement, max);
        let lip = actions::isometry_orbit_lipschitz(&action, &s, &x0, horizon).unwrap();
        prop_assert!(!lip.verdict.is_refuted());
    }

    #[test]
    fn rotation_certificates_are_sound(k in 1usize..24) {
        let base = BaseGraph::cycle(24, 0.25).unwrap();
        let grid = ConeGrid::new(base, [1.0, 2.0, 3.0, 4.0]).unwrap();
        let cone = SpaceHandle::cone(ConeSpace::new(grid, LambdaFunction::Linear));
        let rot = ActionSpec::cone_rotation(&cone, k).unwrap();
        let x0: Point = ConePoint::new(0, 4.0).into();
        let domain = BallSpec { center: x0.clone(), radius: 2.0 };
        let v = actions::detect_coarse_fixed_point_isometry(&rot, &cone, &x0, &domain, 600, 5).unwrap();
        if let IsometryFixedPointVerdict::Certificate(c) = v {
            prop_assert_eq!(c.recompute_l(&rot, &cone).unwrap(), c.l);
            prop_assert!(c.max_orbit_distance < c.bound);
            let lip = actions::isometry_orbit_lipschitz(&rot, &cone, &x0, 60).unwrap();
            prop_assert!(!lip.verdict.is_refuted());
        } else {
            prop_assert!(false, "{:?}", v);
        }
    }
}

fn small_cone() -> ConeSpace {
    let base = BaseGraph::parse_edge_list(
        "0 1 1/4\n1 2 1/4\n2 3 1/2\n3 4 1/4\n4 5 1/4\n5 0 1/3\n0 6 1\n6 7 1/8\n7 8 1/8\n8 9 1/2\n9 10 1/4\n10 11 1/4\n11 6 1/2\n2 8 1\n",
    )
    .unwrap();
    let grid = ConeGrid::geometric(base, 8.0, 1).unwrap();
    ConeSpace::new(grid, LambdaFunction::Linear)
}

#[test]
fn word_metric_matches_bfs_oracle() {
    let z2 = SpaceHandle::integer_lattice(2);
    for (p, d) in z2.word_metric_bfs_oracle(6).unwrap() {
        assert_eq!(z2.int_distance(z2.basepoint(), &p).unwrap(), d);
    }
    let f2 = SpaceHandle::free_group();
    let oracle = f2.word_metric_bfs_oracle(5).unwrap();
    assert_eq!(oracle.len() as u64, ball_cardinality(5));
    for (p, d) in oracle {
        assert_eq!(p.as_word().unwrap().len() as u64, d);
    }
    for r in 0..=6u32 {
        let ball = f2.closed_ball(f2.basepoint(), r as f64).unwrap();
        assert_eq!(ball.len() as u64, ball_cardinality(r));
    }
}

#[test]
fn odometer_fibres_to_depth_12() {
    // Collisions come only from the length-raising carry: (1,…,1) and
    // (0,1,…,1) share the image (1,0,…,0). Fibres have at most two points.
    let vs = TreeVertex::all_up_to_depth(12);
    let mut fibres: std::collections::HashMap<TreeVertex, Vec<TreeVertex>> = std::collections::HashMap::new();
    for v in &vs {
        fibres.entry(odometer_step(v)).or_default().push(v.clone());
    }
    let mut shared = 0;
    for (image, pre) in &fibres {
        match pre.len() {
            1 => {}
            2 => {
                let n = image.depth() - 1;
                let ones = TreeVertex::from_lsb_first(vec![true; n]);
                let mut padded = vec![true; n];
                padded.push(false);
                let mut expected = vec![ones, TreeVertex::from_lsb_first(padded)];
                expected.sort_by_key(|v| v.depth());
                let mut got = pre.clone();
                got.sort_by_key(|v| v.depth());
                assert_eq!(got, expected);
                shared += 1;
            }
            k => panic!("fibre of size {k} over {image}"),
        }
    }
    // one shared image per length 1..=11
    assert_eq!(shared, 11);
    for v in vs.iter().filter(|v| !v.is_root()) {
        assert_eq!(odometer_step(v).value(), v.value() + 1);
    }
}

#[test]
fn boundary_witness_for_every_prefix_up_to_length_10() {
    let mut total = 0;
    for n in 1..=10 {
        for w in reduced_words_of_length(n) {
            let z = BoundaryDirection::new(w).unwrap();
            assert!(verify_boundary_witness(&z, boundary_moves_witness(&z)));
            total += 1;
        }
    }
    assert_eq!(total, (1..=10).map(|n| 4 * 3usize.pow(n - 1)).sum::<usize>());
}

#[test]
fn refutation_witnesses_recheck() {
    let z = SpaceHandle::integer_lattice(1);
    let c = PointMap::constant(LatticePoint::new(vec![0]).into());
    let r = coarse::properness_table(&c, &z, &z, &[1.0, 2.0], 6.0).unwrap();
    match &r.verdict {
        coarse::Verdict::Refuted { witness } => {
            assert_eq!(z.distance(&witness.src, &witness.dst).unwrap(), witness.distance);
        }
        other => panic!("{other:?}"),
    }
    let doubling = ActionSpec::natural(PointMap::new("2x+1", |p| {
        Ok(p.as_lattice()?.scale(2).add(&LatticePoint::new(vec![1])).into())
    }), false);
    let r = actions::isometry_orbit_lipschitz(&doubling, &z, z.basepoint(), 8).unwrap();
    match &r.verdict {
        coarse::Verdict::Refuted { witness } => {
            assert_eq!(z.distance(&witness.src, &witness.dst).unwrap(), witness.distance);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn higson_defect_shrinks_with_the_ball() {
    let z = SpaceHandle::integer_lattice(1);
    let f = ScalarFunction::builtin("sin-log-norm", &z).unwrap();
    let t = coarse::higson_defect(&f, &z, 5.0, &[1.0, 10.0, 100.0, 1000.0], 2000.0).unwrap();
    assert!(t.rows.windows(2).all(|w| w[0].ball < w[1].ball && w[1].defect <= w[0].defect));
}

#[test]
fn isometry_flag_is_checked() {
    let t = SpaceHandle::binary_tree();
    let odo = ActionSpec::odometer();
    assert!(odo.verify_isometry(&t, 3.0).is_err());
    let z2 = SpaceHandle::integer_lattice(2);
    let a = ActionSpec::self_translation(&z2).unwrap();
    a.verify_isometry(&z2, 4.0).unwrap();
    assert_eq!(a.check_commutativity(&z2, 4.0).unwrap(), None);
    let f2 = SpaceHandle::free_group();
    let reports = actions::verify_coarse_action(&ActionSpec::self_translation(&f2).unwrap(), &f2, &[1.0, 2.0, 4.0], 4.0).unwrap();
    for r in reports.iter().filter(|r| r.property == coarse::Property::Bornologous) {
        assert!(r.rows.iter().all(|row| row.value == row.scale));
    }
}

#[test]
fn odometer_profile_has_offset_two() {
    let t = SpaceHandle::binary_tree();
    let odo = ActionSpec::odometer();
    let reports = actions::verify_coarse_action(&odo, &t, &[1.0, 2.0, 4.0], 8.0).unwrap();
    let born = &reports[0];
    assert!(born.rows.iter().all(|r| r.value <= r.scale + 2.0));
    assert_eq!(born.value_at(4.0), Some(6.0));
    assert_eq!(born.affine.unwrap().slope, 1.0);
    assert!(!reports[1].verdict.is_refuted());
    let orbit = actions::detect_coarse_fixed_point_finite(&odo, &t, t.basepoint(), 1000).unwrap();
    assert!(matches!(orbit, CycleVerdict::InconclusiveAtHorizon { .. }));
}
