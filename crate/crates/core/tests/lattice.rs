mod common;

use npair::lattice::{direct_sum_check, l_set, parse_dump, write_dump, BoxSet, Coord, DirectSumReport, LatticeBox};
use npair::one_dim::{evaluate_npair, NPairSpec, Parity};
use proptest::prelude::*;

use common::{naive_direct_sum, points};

fn small_box() -> impl Strategy<Value = LatticeBox> {
    prop::collection::vec(1u64..7, 1..=3).prop_map(|b| LatticeBox::new(b).unwrap())
}

fn set_in(bounds: LatticeBox, with_origin: bool) -> impl Strategy<Value = BoxSet> {
    let cells = bounds.cells() as usize;
    prop::collection::vec(any::<bool>(), cells).prop_map(move |mask| {
        let pts: Vec<Vec<Coord>> = bounds
            .points()
            .zip(mask)
            .enumerate()
            .filter(|(i, (_, keep))| *keep || (with_origin && *i == 0))
            .map(|(_, (p, _))| p)
            .collect();
        BoxSet::new(bounds.clone(), pts).unwrap()
    })
}

fn two_sets() -> impl Strategy<Value = (BoxSet, BoxSet)> {
    small_box().prop_flat_map(|b| (set_in(b.clone(), true), set_in(b, true)))
}

proptest! {
    #[test]
    fn direct_sum_matches_brute_force((a, b) in two_sets()) {
        let window = a.bounds().clone();
        let report = direct_sum_check(&a, &b, &window).unwrap();
        match naive_direct_sum(&a, &b, &window) {
            None => prop_assert_eq!(report, DirectSumReport::Ok),
            Some((point, count)) => prop_assert_eq!(report, DirectSumReport::Failure { point, count }),
        }
    }

    #[test]
    fn points_come_out_sorted_and_distinct(bounds in small_box(), seed in any::<u64>()) {
        let cells: Vec<Vec<Coord>> = bounds.points().collect();
        let mut picked: Vec<Vec<Coord>> = cells
            .iter()
            .enumerate()
            .filter(|(i, _)| (seed >> (i % 64)) & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect();
        picked.reverse();
        let doubled: Vec<Vec<Coord>> = picked.iter().chain(&picked).cloned().collect();
        let set = BoxSet::new(bounds, doubled).unwrap();
        let listed: Vec<Vec<Coord>> = set.iter().collect();
        let mut expected = picked.clone();
        expected.sort();
        expected.dedup();
        prop_assert_eq!(listed, expected);
    }

    #[test]
    fn dump_round_trip(set in small_box().prop_flat_map(|b| set_in(b, false))) {
        let text = write_dump(&set);
        prop_assert_eq!(parse_dump(&text).unwrap(), set);
    }

    #[test]
    fn staircase_tiles_with_its_ray(a in prop::collection::vec(1u64..5, 2..=3), side in 1u64..8) {
        let ray = BoxSet::line(side, 0..side).unwrap().scale_line(&a).unwrap();
        let window = LatticeBox::new(ray.bounds().bounds().to_vec()).unwrap();
        let stairs = l_set(&a, &window).unwrap();
        prop_assert!(direct_sum_check(&stairs, &ray, &window).unwrap().is_ok());
    }

    #[test]
    fn cartesian_of_pairs_is_a_pair(
        left in prop::collection::vec(2u64..4, 1..=2),
        right in prop::collection::vec(2u64..4, 1..=2),
        tails in any::<(bool, bool)>(),
    ) {
        let one = |r: &[Coord], tail: bool| {
            let spec = NPairSpec::radix(r.to_vec(), tail, Parity::TEven).unwrap();
            evaluate_npair(&spec, &LatticeBox::new(vec![24]).unwrap()).unwrap()
        };
        let p = one(&left, tails.0);
        let q = one(&right, tails.1);
        let t = p.t.cartesian(&q.t).unwrap();
        let s = p.s.cartesian(&q.s).unwrap();
        prop_assert!(direct_sum_check(&t, &s, t.bounds()).unwrap().is_ok());
        prop_assert_eq!(t.len(), p.t.len() * q.t.len());
    }

    #[test]
    fn restrict_keeps_exactly_the_inner_points(
        set in small_box().prop_flat_map(|b| set_in(b, false)),
        shrink in prop::collection::vec(0u64..3, 3),
    ) {
        let inner: Vec<Coord> = set.bounds().bounds().iter().zip(&shrink).map(|(&m, &d)| m.saturating_sub(d).max(1)).collect();
        let inner = LatticeBox::new(inner).unwrap();
        let got = points(&set.restrict(&inner).unwrap());
        let expected = points(&set).into_iter().filter(|p| inner.contains(p)).collect();
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn failure_reports_the_least_point() {
    let b = LatticeBox::new(vec![4, 4]).unwrap();
    let a = BoxSet::new(b.clone(), [[0, 0], [1, 0]]).unwrap();
    let c = BoxSet::new(b.clone(), [[0, 0], [0, 1], [1, 0]]).unwrap();
    assert_eq!(
        direct_sum_check(&a, &c, &b).unwrap(),
        DirectSumReport::Failure { point: vec![0, 2], count: 0 }
    );
}

#[test]
fn window_must_fit_inside_both_operands() {
    let small = BoxSet::origin(LatticeBox::new(vec![2, 2]).unwrap());
    let big = LatticeBox::new(vec![3, 3]).unwrap();
    assert!(direct_sum_check(&small, &small, &big).is_err());
}

#[test]
fn dump_rejects_points_outside_the_box() {
    assert!(parse_dump("# point-set v1\ndim 1\nbox 3\n5\n").is_err());
    assert!(parse_dump("dim 2\nbox 4 4\n1 x\n").is_err());
}
