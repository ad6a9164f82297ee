//! Gottesman-Knill simulation on the destabilizer tableau, checked against
//! the dense Born rule.

use polysim::pauli::{CliffordGate, PauliIndex};
use polysim::tableau::{MeasureMode, StabilizerTableau};
use rand::SeedableRng;

fn main() -> polysim::Result<()> {
    let mut t = StabilizerTableau::init_zero(3)?;
    for g in [CliffordGate::H(0), CliffordGate::Cnot(0, 1), CliffordGate::Cnot(1, 2)] {
        t.apply_gate(g)?;
    }
    println!("GHZ stabilizers: {:?}", t.stabilizer_strings());
    println!("tableau:\n{}", t.dump());

    let zzi = PauliIndex::parse("ZZI")?;
    let m = t.measure(&zzi, false, MeasureMode::Forced(false))?;
    println!("measure ZZI: outcome {} deterministic {}", m.outcome as u8, m.deterministic);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let m = t.measure(&PauliIndex::parse("ZII")?, false, MeasureMode::Random(&mut rng))?;
    println!("measure ZII: outcome {} with probability {}", m.outcome as u8, m.probability);
    println!("after collapse: {:?}", t.stabilizer_strings());

    let dense = t.to_state()?;
    println!(
        "post-state trace {:.3}, purity check Tr(rho^2) = {:.3}",
        dense.trace().re,
        dense.matmul(&dense)?.trace().re
    );
    Ok(())
}
