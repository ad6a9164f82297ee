//! Monte-Carlo estimation from a signed decomposition of a magic state.

use polysim::adaptive::{evaluate_born, AdaptiveComputation};
use polysim::engine::{estimate_quasi, hoeffding_samples, Event, VertexModel};
use polysim::geometry::{robustness, Arithmetic, CoeffVector, VertexSet};

fn main() -> polysim::Result<()> {
    let comp = AdaptiveComputation::from_json(
        r#"{"model":"pauli","n":1,"resource":"magic_t_all","steps":[{"type":"measure","cases":{"":"X"}}]}"#,
    )?;
    let model = VertexModel::derive(&comp, VertexSet::stabilizer, Arithmetic::Exact)?;
    let rho = CoeffVector::from_operator(&comp.initial_state()?)?;
    let dec = robustness(&rho, &model.stages()[0])?;
    println!("negativity ||r||_1 = {:.7}", dec.negativity);
    println!("samples for eps = delta = 0.05: {}", hoeffding_samples(dec.negativity, 0.05, 0.05)?);

    let event = Event::parse("0")?;
    let report = estimate_quasi(&comp, &model, &dec, &event, 0.01, 0.05, 2024)?;
    let truth = evaluate_born(&comp)?.distribution["0"];
    println!("estimate {:.5} from {} samples; oracle {truth:.6}", report.estimate, report.samples);
    Ok(())
}
