//! Times the tableau on random Clifford circuits at two sizes.
//!
//! `cargo run --release --example tableau_bench -- 1000`

use polysim::engine::{random_clifford_circuit, run_tableau_fast};

fn main() -> polysim::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let mut last = None;
    for size in [n, 2 * n] {
        let comp = random_clifford_circuit(size, 100_000, 1000, 7)?;
        let t = run_tableau_fast(&comp, 1, 7)?.timing;
        println!(
            "n = {size:>5}: {:.3} s total, {:.0} ns/gate, {:.0} ns/measurement",
            t.total_seconds, t.mean_gate_ns, t.mean_measurement_ns
        );
        if let Some(prev) = last {
            println!("doubling factor: {:.2}", t.total_seconds / prev);
        }
        last = Some(t.total_seconds);
    }
    Ok(())
}
