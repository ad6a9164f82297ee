//! CNC sets, value assignments and the Mermin-square obstruction.

use polysim::cnc::{enumerate_maximal_cnc, is_closed, value_assignments};
use polysim::pauli::PauliIndex;

fn main() -> polysim::Result<()> {
    let omega: Vec<PauliIndex> =
        ["II", "XI", "IX", "XX"].iter().map(|s| PauliIndex::parse(s)).collect::<Result<_, _>>()?;
    println!("{{II, XI, IX, XX}} closed: {}", is_closed(&omega)?.is_closed());
    println!("  value assignments: {}", value_assignments(&omega)?.len());

    let everything: Vec<PauliIndex> = PauliIndex::all(2).collect();
    println!("all two-qubit Paulis: {} value assignments (Mermin square)", value_assignments(&everything)?.len());

    let one = enumerate_maximal_cnc(1)?;
    println!("maximal CNC operators at n = 1: {}", one.len());
    for label in &one {
        println!("  {label}");
    }
    println!("maximal CNC operators at n = 2: {}", enumerate_maximal_cnc(2)?.len());
    Ok(())
}
