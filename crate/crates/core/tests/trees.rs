mod common;

use npair::corpus::CorpusGenerator;
use npair::extension::{extend_pair, is_illegal, tree_extend, ExtensionStep, PairKind};
use npair::lattice::{Coord, LatticeBox};
use npair::one_dim::{evaluate_npair, NPairSpec};
use npair::structure::separability;
use npair::tree::{closed_form, elimination_orders, evaluate_factorization, generate, generate_in_order, parse_tree, write_tree};
use npair::Error;
use proptest::prelude::*;

use common::{branch_tree, greedy_complement, points};

fn small_box(dim: usize) -> LatticeBox {
    let side = match dim {
        1 => 40,
        2 => 16,
        3 => 8,
        _ => 5,
    };
    LatticeBox::cube(dim, side).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_agrees_with_generation(seed in any::<u64>()) {
        let tree = CorpusGenerator::with_seed(seed).tree();
        let bounds = small_box(tree.dim());
        let pair = generate(&tree, &bounds).unwrap();
        let f = closed_form(&tree).unwrap();
        prop_assert_eq!(evaluate_factorization(&f, &bounds).unwrap(), pair);
    }

    #[test]
    fn generated_pairs_tile(seed in any::<u64>()) {
        let tree = CorpusGenerator::with_seed(seed).tree();
        let bounds = small_box(tree.dim());
        let pair = generate(&tree, &bounds).unwrap();
        prop_assert_eq!(pair.dim(), tree.dim());
        prop_assert!(pair.check().unwrap().is_ok());
    }

    #[test]
    fn complement_is_forced(seed in any::<u64>()) {
        let tree = CorpusGenerator::with_seed(seed).tree();
        let bounds = small_box(tree.dim());
        let pair = generate(&tree, &bounds).unwrap();
        prop_assert_eq!(points(&pair.s), greedy_complement(&pair.t));
    }

    #[test]
    fn tree_text_round_trip(seed in any::<u64>()) {
        let tree = CorpusGenerator::with_seed(seed).tree();
        let text = write_tree(&tree);
        let back = parse_tree(&text).unwrap();
        prop_assert_eq!(write_tree(&back), text);
        prop_assert_eq!(back, tree);
    }

    #[test]
    fn elimination_order_does_not_matter(seed in any::<u64>()) {
        let tree = CorpusGenerator::with_seed(seed).tree_with_tops(3);
        let bounds = small_box(tree.dim());
        let reference = generate(&tree, &bounds).unwrap();
        for order in elimination_orders(&tree, 24) {
            prop_assert_eq!(&generate_in_order(&tree, &bounds, &order).unwrap(), &reference);
        }
    }

    #[test]
    fn tree_surgery_commutes_with_set_extension(seed in any::<u64>(), first in any::<bool>()) {
        let mut gen = CorpusGenerator::with_seed(seed);
        let tree = gen.tree();
        if tree.dim() > 3 {
            return Ok(());
        }
        let axis = (seed % tree.dim() as u64) as usize;
        let step = if first {
            ExtensionStep::First { axis, pair: gen.interval_pair(4) }
        } else {
            let a = vec![1 + (seed >> 9) % 3, 1 + (seed >> 11) % 3];
            let mut delta = seed >> 8 & 1;
            if tree.norm() == 0 && is_illegal(PairKind::of_spec(tree.initial()), &ExtensionStep::Second { axis, delta, a: a.clone() }) {
                delta ^= 1;
            }
            ExtensionStep::Second { axis, delta, a }
        };
        let bounds = LatticeBox::cube(tree.dim(), 6).unwrap();
        let by_sets = extend_pair(&generate(&tree, &bounds).unwrap(), &step).unwrap();
        let extended = tree_extend(&tree, &step).unwrap();
        prop_assert_eq!(generate(&extended, by_sets.bounds()).unwrap(), by_sets.clone());
        prop_assert!(by_sets.check().unwrap().is_ok());
    }
}

#[test]
fn branch_tree_golden_points() {
    let pair = generate(&branch_tree(), &LatticeBox::cube(4, 40).unwrap()).unwrap();
    let expected: Vec<Vec<Coord>> = vec![
        vec![0, 0, 0, 0],
        vec![0, 0, 0, 2],
        vec![2, 2, 2, 0],
        vec![2, 2, 2, 2],
        vec![16, 16, 16, 24],
        vec![16, 16, 16, 26],
        vec![18, 18, 18, 24],
        vec![18, 18, 18, 26],
    ];
    assert_eq!(pair.t.iter().collect::<Vec<_>>(), expected);
}

#[test]
fn branch_tree_atoms_are_the_t_product() {
    let f = closed_form(&branch_tree()).unwrap();
    let text = f.to_string();
    let atoms: Vec<&str> = text.lines().filter(|l| l.starts_with("P[")).collect();
    assert_eq!(
        atoms,
        [
            "P[x1] = 1",
            "P[x2] = 1",
            "P[x3] = 1",
            "P[y1] = 1 + x1^2 x2^2 x3^2",
            "P[x4] = 1 + x4^2",
            "P[phi] = 1 + x1^16 x2^16 x3^16 x4^24",
        ]
    );
}

#[test]
fn trivial_tree_gives_the_origin() {
    let tree = parse_tree("[tree]\nroot phi\n[initial]\nspecial=zero-T\n").unwrap();
    let pair = generate(&tree, &LatticeBox::new(vec![9]).unwrap()).unwrap();
    assert_eq!(pair.t.values(), &[0]);
    assert_eq!(pair.s.len(), 9);
}

#[test]
fn bad_delta_row_is_a_validation_error() {
    let text = write_tree(&branch_tree()).replace("y1 0\n", "y1 2\n");
    let tree = parse_tree(&text).unwrap();
    assert!(matches!(tree.check(), Err(Error::InvalidTree(m)) if m.contains("delta must be 0 or 1")));
}

#[test]
fn root_delta_follows_a_trivial_initial_pair() {
    let text = "[tree]\nnode a parent phi\nnode b parent phi\n[initial]\nspecial=zero-T\n[delta]\nphi 0\n[alpha]\na 1\nb 1\n[phi]\na C={0} D={0}\nb C={0} D={0}\n";
    let tree = parse_tree(text).unwrap();
    assert!(matches!(tree.check(), Err(Error::InvalidTree(_))));
}

#[test]
fn illegal_steps_are_refused_and_split() {
    for (spec, delta) in [(NPairSpec::ZeroT, 0), (NPairSpec::ZeroS, 1)] {
        let step = ExtensionStep::Second { axis: 0, delta, a: vec![2, 3] };
        let tree = npair::tree::WeightedTree::leaf(spec.clone());
        assert!(matches!(tree_extend(&tree, &step), Err(Error::IllegalExtension(_))));
        // On sets the step still runs, and its output is a product.
        let line = evaluate_npair(&spec, &LatticeBox::new(vec![16]).unwrap()).unwrap();
        let pair = extend_pair(&line, &step).unwrap();
        assert!(pair.check().unwrap().is_ok());
        assert!(separability(&pair.t).unwrap().separable);
    }
}

#[test]
fn legal_step_on_a_trivial_pair_is_primitive() {
    let line = evaluate_npair(&NPairSpec::ZeroT, &LatticeBox::new(vec![16]).unwrap()).unwrap();
    let pair = extend_pair(&line, &ExtensionStep::Second { axis: 0, delta: 1, a: vec![2, 3] }).unwrap();
    assert!(!separability(&pair.t).unwrap().separable);
}

#[test]
fn twenty_five_node_trees_generate() {
    let mut gen = CorpusGenerator::with_seed(25);
    for _ in 0..5 {
        let tree = gen.tree_with_nodes(25).unwrap();
        assert_eq!(tree.len(), 25);
        let bounds = small_box(tree.dim());
        let pair = generate(&tree, &bounds).unwrap();
        assert!(pair.check().unwrap().is_ok());
        assert_eq!(evaluate_factorization(&closed_form(&tree).unwrap(), &bounds).unwrap(), pair);
    }
}
