//! Vertex sets, hull membership, dual polytopes and robustness.

use polysim::geometry::{dual_vertices, membership, robustness, robustness_exact, CoeffVector, Membership, VertexSet};
use polysim::pauli::magic_t_state;

fn main() -> polysim::Result<()> {
    let sp1 = VertexSet::stabilizer(1)?;
    println!("SP_1 vertices: {:?}", sp1.labels());
    for n in 1..=3 {
        println!("stabilizer states at n = {n}: {}", VertexSet::stabilizer(n)?.len());
    }

    let cube = dual_vertices(&sp1, false)?;
    println!(
        "dual of SP_1 has {} vertices; equals the CNC cube: {}",
        cube.len(),
        cube.same_vectors(&VertexSet::cnc(1)?, 1e-12)
    );

    let rho_t = CoeffVector::from_operator(&magic_t_state())?;
    match membership(&rho_t, &sp1)? {
        Membership::Inside { .. } => println!("rho_T inside SP_1"),
        Membership::Outside { functional } => println!("rho_T outside SP_1, separating functional {functional:?}"),
    }
    let r = robustness(&rho_t, &sp1)?;
    println!("robustness(rho_T, SP_1) = {:.7}", r.negativity);
    let zero = sp1.vector(sp1.position("+Z").expect("label exists"));
    println!("robustness(|0>, SP_1), exact = {}", robustness_exact(zero, &sp1)?.negativity);
    Ok(())
}
