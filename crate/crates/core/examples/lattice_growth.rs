//! Grows a surface front on a small periodic lattice and counts the orderings
//! of a two-row stem.
//!
//!     cargo run --example lattice_growth

use lightcone_collapse::lattice::{LatticeGeometry, SurfaceFront, VertexId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lightcone_collapse::Result<()> {
    let g = LatticeGeometry::new(4)?;
    let mut front = SurfaceFront::zero(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!("slots per row: {}", g.n_slots());
    for n in 1..=12 {
        let ready = g.ready_vertices(&front)?;
        let v = g.pick_next(&front, &mut rng)?;
        let (a, b) = g.slots_of(v);
        g.advance_in_place(&mut front, v)?;
        println!(
            "{n:>2}: {} ready, took {v} on slots ({a}, {b}) -> heights {:?}",
            ready.len(),
            front.heights()
        );
        assert!(g.is_valid_front(&front));
    }
    println!("completed rows: {}", front.completed_rows());

    let stem: Vec<VertexId> = (1..=2).flat_map(|t| (0..3).map(move |c| VertexId::new(c, t))).collect();
    let g3 = LatticeGeometry::new(3)?;
    let orders = g3.linear_extensions(&stem, usize::MAX)?;
    println!("N=3 two-row stem has {} linear extensions", orders.len());
    Ok(())
}
