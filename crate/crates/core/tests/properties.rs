use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lightcone_collapse::diagnostics::{block_sum, convergence_time, overlap_deficit, Block, BlockNorm};
use lightcone_collapse::dynamics::{FieldHistory, HistoryRecord, Model};
use lightcone_collapse::hilbert::{Outcome, StateVector};
use lightcone_collapse::lattice::{LatticeGeometry, SurfaceFront, VertexId};

/// Ready set from first principles: `(c, t)` consumes slots `2c + (t - 1) % 2`
/// and the next one, both of which must sit at height `t - 1`.
fn greedy_ready(n: usize, heights: &[u64]) -> BTreeSet<(u64, usize)> {
    let slots = 2 * n;
    let mut out = BTreeSet::new();
    for c in 0..n {
        for t in 1..=heights.iter().max().unwrap() + 1 {
            let a = (2 * c + ((t - 1) % 2) as usize) % slots;
            let b = (a + 1) % slots;
            if heights[a] == t - 1 && heights[b] == t - 1 {
                out.insert((t, c));
            }
        }
    }
    out
}

fn random_history(model: &Model, len: usize, rng: &mut ChaCha8Rng) -> FieldHistory {
    let mut h = FieldHistory::new(model.geometry);
    let mut front = SurfaceFront::zero(&model.geometry);
    for _ in 0..len {
        let v = model.geometry.pick_next(&front, rng).unwrap();
        model.geometry.advance_in_place(&mut front, v).unwrap();
        h.push(v, Outcome::from_index(rng.gen_range(0..4))).unwrap();
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fronts_stay_valid_and_ready_sets_match(n in 2usize..7, draws in prop::collection::vec(0.0f64..1.0, 1..80)) {
        let g = LatticeGeometry::new(n).unwrap();
        let mut front = SurfaceFront::zero(&g);
        for u in draws {
            let ready: BTreeSet<(u64, usize)> =
                g.ready_vertices(&front).unwrap().iter().map(|v| (v.row, v.col)).collect();
            prop_assert_eq!(&ready, &greedy_ready(n, front.heights()));
            let v = g.pick_with_draw(&front, u).unwrap();
            g.advance_in_place(&mut front, v).unwrap();
            prop_assert!(g.is_valid_front(&front));
            let (lo, hi) = (front.heights().iter().min().unwrap(), front.heights().iter().max().unwrap());
            prop_assert!(hi - lo <= n as u64);
        }
    }

    #[test]
    fn blocked_vertices_are_refused(n in 2usize..6, seed in any::<u64>()) {
        let g = LatticeGeometry::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut front = SurfaceFront::zero(&g);
        for _ in 0..3 * n {
            let v = g.pick_next(&front, &mut rng).unwrap();
            g.advance_in_place(&mut front, v).unwrap();
        }
        let ready = greedy_ready(n, front.heights());
        let top = front.heights().iter().max().unwrap() + 2;
        for c in 0..n {
            let v = VertexId::new(c, top);
            prop_assert!(!ready.contains(&(top, c)));
            prop_assert!(g.advance(&front, v).is_err());
        }
    }

    #[test]
    fn povm_sums_to_one(n in 2usize..6, x in 0.0f64..=1.0, theta in 0.0f64..std::f64::consts::PI, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = Model::new(n, x, theta).unwrap();
        let mut psi = StateVector::random(n, &mut rng).unwrap();
        let v = VertexId::new(rng.gen_range(0..n), rng.gen_range(1..5));
        let (a, b) = model.geometry.slots_of(v);
        psi.apply_two_qubit(a, b, model.rmatrix.op()).unwrap();
        let total: f64 = psi.outcome_probabilities(a, b, &model.jumps).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duality_flips_states_and_outcomes(n in 2usize..5, x in 0.05f64..1.0, theta in 0.0f64..1.6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = Model::new(n, x, theta).unwrap();
        let psi = StateVector::random(n, &mut rng).unwrap();
        let h = random_history(&model, 3 * n, &mut rng);
        let p = model.stem_probability(&psi, &h).unwrap().value();
        let q = model.stem_probability(&psi.bit_flipped(), &h.bit_flipped()).unwrap().value();
        prop_assert!((p - q).abs() < 1e-12, "{} vs {}", p, q);
    }

    #[test]
    fn stem_probability_ignores_labelling(len in 2usize..10, x in 0.05f64..1.0, theta in 0.0f64..1.6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = Model::new(3, x, theta).unwrap();
        let psi = StateVector::random(3, &mut rng).unwrap();
        let h = random_history(&model, len, &mut rng);
        let outcome_of = |v: VertexId| h.records().iter().find(|r| r.vertex == v).unwrap().outcome;
        let p0 = model.stem_probability(&psi, &h).unwrap().value();
        for order in model.geometry.linear_extensions(&h.vertices(), 6).unwrap() {
            let relabelled = FieldHistory::from_records(
                model.geometry,
                order.iter().map(|&vertex| HistoryRecord { vertex, outcome: outcome_of(vertex) }),
            ).unwrap();
            let p = model.stem_probability(&psi, &relabelled).unwrap().value();
            prop_assert!((p - p0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_steps_keep_norm_and_sector(n in 2usize..6, x in 0.0f64..=1.0, theta in 0.0f64..1.6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(0..=2 * n);
        let model = Model::new(n, x, theta).unwrap();
        let mut psi = StateVector::random_in_sector(n, m, &mut rng).unwrap();
        let mut front = SurfaceFront::zero(&model.geometry);
        for _ in 0..20 * n {
            model.step_sample(&mut psi, &mut front, &mut rng).unwrap();
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!((psi.particle_number_decomposition()[m] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn signed_blocks_are_linear(
        n in 1usize..4, m in 1u64..5, rows in 1u64..20,
        a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links: Vec<u64> = (1..=rows).flat_map(|t| std::iter::repeat_n(t, 2 * n)).collect();
        let x: Vec<f64> = links.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = links.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sum = |v: &[f64], norm| block_sum(links.iter().copied().zip(v.iter().copied()), m, n, rows, norm);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let (bx, by, bc) = (
            sum(&x, BlockNorm::Signed).unwrap(),
            sum(&y, BlockNorm::Signed).unwrap(),
            sum(&combo, BlockNorm::Signed).unwrap(),
        );
        prop_assert_eq!(bc.blocks.len() as u64, rows / m);
        for k in 0..bc.blocks.len() {
            let expect = a * bx.blocks[k].value + b * by.blocks[k].value;
            prop_assert!((bc.blocks[k].value - expect).abs() < 1e-9);
        }
        let (ax, ac) = (sum(&x, BlockNorm::AbsoluteLinks).unwrap(), sum(&combo, BlockNorm::AbsoluteLinks).unwrap());
        let ay = sum(&y, BlockNorm::AbsoluteLinks).unwrap();
        for k in 0..ac.blocks.len() {
            prop_assert!(ac.blocks[k].value <= a.abs() * ax.blocks[k].value + b.abs() * ay.blocks[k].value + 1e-9);
        }
    }

    #[test]
    fn convergence_time_is_monotone_in_delta(
        values in prop::collection::vec(0.0f64..1.0, 1..40),
        d1 in 1e-3f64..1.0, d2 in 1e-3f64..1.0,
    ) {
        let blocks: Vec<Block> = values.iter().enumerate().map(|(k, &v)| Block { start: 1 + 10 * k as u64, value: v }).collect();
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let (a, b) = (convergence_time(&blocks, lo), convergence_time(&blocks, hi));
        if a.converged {
            prop_assert!(b.converged);
            prop_assert!(b.t_c.unwrap() <= a.t_c.unwrap());
        }
    }

    #[test]
    fn overlap_deficit_is_bounded_and_phase_blind(n in 1usize..5, phase in 0.0f64..6.3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (StateVector::random(n.max(2), &mut rng).unwrap(), StateVector::random(n.max(2), &mut rng).unwrap());
        let c = overlap_deficit(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        let mut rotated = q.clone();
        rotated.scale(Complex64::from_polar(1.0, phase));
        prop_assert!((overlap_deficit(&p, &rotated).unwrap() - c).abs() < 1e-12);
        prop_assert!(overlap_deficit(&p, &p).unwrap() < 1e-12);
    }
}
