//! One elementary motion by hand: R on the two ingoing slots, then a hit.
//!
//!     cargo run --example povm_step

use lightcone_collapse::hilbert::{JumpFamily, Outcome, RMatrix, StateVector};
use lightcone_collapse::lattice::{LatticeGeometry, VertexId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lightcone_collapse::Result<()> {
    let theta = 0.1 * std::f64::consts::PI;
    let r = RMatrix::new(theta)?;
    let jumps = JumpFamily::new(0.95)?;
    println!("unitarity defect {:.2e}", r.op().unitarity_defect());
    println!("completeness defect {:.2e}", jumps.completeness_defect());

    let g = LatticeGeometry::new(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut psi = StateVector::random(3, &mut rng)?;
    let (a, b) = g.slots_of(VertexId::new(1, 1));
    psi.apply_two_qubit(a, b, r.op())?;

    let p = psi.outcome_probabilities(a, b, &jumps)?;
    for o in Outcome::ALL {
        println!("p({o}) = {:.6}", p[o.index()]);
    }
    println!("sum = {:.15}", p.iter().sum::<f64>());

    let before = psi.pair_marginals(a, b)?;
    psi.apply_jump(a, b, Outcome::new(true, false), &jumps)?;
    let after = psi.pair_marginals(a, b)?;
    println!("|b|^2 on ({a}, {b}): {before:.4?} -> {after:.4?} after outcome 10");
    println!("norm after hit {:.15}", psi.norm_sqr());
    Ok(())
}
