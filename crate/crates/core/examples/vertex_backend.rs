//! Exact propagation and sampling through update-map tables for an adaptive
//! circuit whose second measurement depends on the first outcome.

use polysim::adaptive::{evaluate_born, AdaptiveComputation};
use polysim::engine::{propagate_exact, sample, VertexModel};
use polysim::geometry::{Arithmetic, VertexSet};

const CIRCUIT: &str = r#"{"model":"clifford","n":2,"steps":[
  {"type":"gate","name":"H","qubits":[0]},
  {"type":"measure","cases":{"":"XI"}},
  {"type":"gate","name":"CNOT","qubits":[0,1]},
  {"type":"measure","cases":{"0":"ZZ","1":"-YY"}},
  {"type":"measure","cases":{"00":"IX","01":"IZ","10":"XX","11":"ZI"}}]}"#;

fn main() -> polysim::Result<()> {
    let comp = AdaptiveComputation::from_json(CIRCUIT)?;
    let model = VertexModel::derive(&comp, VertexSet::stabilizer, Arithmetic::Exact)?;
    println!("stages: {}, worst diagram error {:e}", model.tables().len(), model.diagram_error(&comp)?);
    let exact = propagate_exact(&comp, &model)?;
    let born = evaluate_born(&comp)?.distribution;
    for (k, p) in &exact {
        println!("  {k}: vertex {p:.6}  oracle {:.6}", born.get(k).copied().unwrap_or(0.0));
    }
    println!("sampled: {:?}", sample(&comp, &model, 4000, 3)?);

    let star = model.tables().iter().skip(1).try_fold(model.tables()[0].clone(), |acc, t| acc.star(t))?;
    println!("star-composed table has {} outcomes", star.outcomes().len());
    Ok(())
}
