//! Stem probabilities: marginalization over the last outcome, independence
//! of the ordering, and the X = 0 projective limit.
//!
//!     cargo run --example stem_probability

use lightcone_collapse::dynamics::{FieldHistory, HistoryRecord, Model};
use lightcone_collapse::hilbert::{Outcome, StateVector};
use lightcone_collapse::lattice::VertexId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lightcone_collapse::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = Model::new(3, 0.6, 0.3)?;
    let psi = StateVector::random(3, &mut rng)?;

    let stem: Vec<VertexId> = (1..=2).flat_map(|t| (0..3).map(move |c| VertexId::new(c, t))).collect();
    let outcomes: Vec<Outcome> = stem.iter().map(|_| Outcome::from_index(rng.gen_range(0..4))).collect();
    let history = |order: &[VertexId]| {
        FieldHistory::from_records(
            model.geometry,
            order.iter().map(|&vertex| HistoryRecord {
                vertex,
                outcome: outcomes[stem.iter().position(|&s| s == vertex).unwrap()],
            }),
        )
    };

    for order in model.geometry.linear_extensions(&stem, 4)? {
        let p = model.stem_probability(&psi, &history(&order)?)?;
        let labels: Vec<String> = order.iter().map(|v| v.to_string()).collect();
        println!("{:.15}  {}", p.value(), labels.join(" "));
    }

    let h = history(&stem)?;
    let parent = h.prefix(5)?;
    let last = h.records()[5].vertex;
    let mut sum = 0.0;
    for o in Outcome::ALL {
        let mut child = parent.clone();
        child.push(last, o)?;
        sum += model.stem_probability(&psi, &child)?.value();
    }
    println!(
        "parent {:.15}  sum over last outcome {sum:.15}",
        model.stem_probability(&psi, &parent)?.value()
    );

    // With X = 0 every hit is a projector, so most histories get probability zero.
    let sharp = Model::new(3, 0.0, 0.3)?;
    let p = sharp.stem_probability(&StateVector::from_bit_string(3, "100000")?, &h)?;
    println!("X = 0: ln p = {}", p.ln);
    Ok(())
}
