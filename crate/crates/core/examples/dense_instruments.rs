//! Dense instruments and the three compositions, the reference model the
//! fast simulators are tested against.

use polysim::adaptive::{horizontal_compose, star_compose, vertical_compose};
use polysim::oracle::{apply_cp, born, pauli_measurement_instrument, pauli_projector, DenseInstrument};
use polysim::pauli::{magic_t_state, PhasedPauli};

fn main() -> polysim::Result<()> {
    let measure = |p: &str| pauli_measurement_instrument(&PhasedPauli::parse(p)?, false, None);
    let mx = measure("X")?;
    let rho = magic_t_state();
    let plus_x = pauli_projector(&PhasedPauli::parse("X")?.materialize()?, false);
    println!("P(X = +1 | rho_T) = {:.6}", born(&rho, &plus_x)?);

    // Adaptive follow-up: measure Z after outcome 0, Y after outcome 1.
    let (mz, my) = (measure("Z")?, measure("Y")?);
    let kraus = [&mz, &my].iter().map(|m| (0..2).map(|s| m.kraus(0, s).to_vec()).collect()).collect();
    let follow = DenseInstrument::new(vec!["0".into(), "1".into()], vec!["0".into(), "1".into()], 2, 2, kraus)?;

    let seq = star_compose(&mx, &follow)?;
    for s in 0..seq.outcomes().len() {
        println!("  outcome {:>2}: {:.4}", seq.outcomes()[s], apply_cp(&seq, 0, s, &rho)?.trace().re);
    }

    let side = horizontal_compose(&mx, &mz)?;
    println!(
        "X (x) Z on two qubits: {} outcomes, trace preserving: {}",
        side.outcomes().len(),
        side.is_trace_preserving(1e-12)
    );
    let stacked = vertical_compose(&mx, &follow)?;
    println!(
        "X on qubit 0 steering qubit 1: {} inputs, {} outcomes, dimension {}",
        stacked.inputs().len(),
        stacked.outcomes().len(),
        stacked.in_dim()
    );
    Ok(())
}
