//! Binary-symplectic Pauli arithmetic: products, commutation and the sign
//! function `beta`.

use polysim::pauli::{beta, omega, CliffordGate, PauliIndex, PhasedPauli};

fn main() -> polysim::Result<()> {
    let xz = PhasedPauli::parse("XZ")?;
    let zx = PhasedPauli::parse("ZX")?;
    println!("XZ * ZX = {}", xz.multiply(&zx)?);

    let (a, b) = (PauliIndex::parse("XX")?, PauliIndex::parse("ZZ")?);
    println!("omega(XX, ZZ) = {}", omega(&a, &b)? as u8);
    println!("beta(XX, ZZ)  = {}  (XX * ZZ = -YY)", beta(&a, &b)? as u8);

    // Clifford conjugation stays inside the Pauli group.
    let p = PhasedPauli::parse("XI")?;
    println!("CNOT (XI) CNOT = {}", p.conjugate(CliffordGate::Cnot(0, 1))?);
    println!("H Y H          = {}", PhasedPauli::parse("Y")?.conjugate(CliffordGate::H(0))?);

    let all: Vec<String> = PauliIndex::all(1).map(|p| p.to_string()).collect();
    println!("one-qubit indices in coefficient order: {all:?}");
    Ok(())
}
