//! The local Pauli model: a two-qubit cluster state with a destructive X
//! measurement, on all three backends.

use polysim::adaptive::{evaluate_born, AdaptiveComputation};
use polysim::engine::{propagate_exact, run_tableau_fast, sample, VertexModel};
use polysim::geometry::{Arithmetic, VertexSet};

const CLUSTER: &str = r#"{"model":"local_pauli","n":2,"resource":"plus_all","graph":[[0,1]],
  "steps":[{"type":"local_measure","qubit":0,"cases":{"":"X"}}]}"#;

fn main() -> polysim::Result<()> {
    let comp = AdaptiveComputation::from_json(CLUSTER)?;
    let born = evaluate_born(&comp)?;
    println!("oracle distribution: {:?}", born.distribution);
    for (s, rho) in &born.post_states {
        println!("  residual after {s}: diag = [{:.3}, {:.3}]", rho[(0, 0)].re, rho[(1, 1)].re);
    }

    // SP_2 for the graph state, SP_1 after the destructive measurement.
    let model = VertexModel::derive(&comp, VertexSet::stabilizer, Arithmetic::Exact)?;
    println!("vertex backend exact: {:?}", propagate_exact(&comp, &model)?);
    println!("vertex backend, 10^4 shots: {:?}", sample(&comp, &model, 10_000, 11)?);
    println!("tableau, 10^4 shots:        {:?}", run_tableau_fast(&comp, 10_000, 11)?.counts);
    Ok(())
}
