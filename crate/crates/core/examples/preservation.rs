//! Preservation checks and LP-derived update maps.

use polysim::geometry::{
    check_preservation, derive_update_map, dual_vertices, simulation_error, Arithmetic, VertexSet,
};
use polysim::oracle::{pauli_measurement_instrument, DenseInstrument, DenseOperator, TOL};
use polysim::pauli::PhasedPauli;

fn main() -> polysim::Result<()> {
    let sp1 = VertexSet::stabilizer(1)?;
    let p1 = dual_vertices(&sp1, false)?;
    for axis in ["X", "Y", "Z"] {
        let m = pauli_measurement_instrument(&PhasedPauli::parse(axis)?, false, None)?;
        let report = check_preservation(&m, &p1, &p1, TOL)?;
        println!("{axis} measurement preserves P_1: {} ({} images)", report.passed(), report.checked);
    }

    let lp1 = dual_vertices(&VertexSet::local_stabilizer(1)?, false)?;
    let destructive = pauli_measurement_instrument(&PhasedPauli::parse("X")?, true, Some(0))?;
    println!(
        "destructive X preserves LP_1 -> scalars: {}",
        check_preservation(&destructive, &lp1, &VertexSet::scalar(), TOL)?.passed()
    );

    let phase = num::complex::Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let t = DenseOperator::from_fn(2, 2, |r, c| {
        if r != c {
            0.0.into()
        } else if r == 0 {
            1.0.into()
        } else {
            phase
        }
    });
    let report = check_preservation(&DenseInstrument::unitary(t)?, &sp1, &sp1, TOL)?;
    let witnesses: Vec<&str> = report.violations.iter().map(|v| v.x.as_str()).collect();
    println!("T gate preserves SP_1: {}; witnesses {witnesses:?}", report.passed());

    let mz = pauli_measurement_instrument(&PhasedPauli::parse("Z")?, false, None)?;
    let table = derive_update_map(&mz, &p1, &p1, Arithmetic::Exact)?;
    println!("update map for Z on P_1 (diagram error {:e}):", simulation_error(&table, &mz, &p1, &p1)?);
    println!("{}", serde_json::to_string_pretty(&table).expect("table serializes"));
    Ok(())
}
