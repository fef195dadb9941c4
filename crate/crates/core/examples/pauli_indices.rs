//! Indices of the Pauli channel `X ↦ (σ_x X σ_x + σ_y X σ_y + σ_z X σ_z)/3`.

use qprim::generators::pauli_channel;
use qprim::indices::{primitivity_report, IndexOptions};
use qprim::spans::s_dims;
use qprim::TolerancePolicy;

fn main() -> qprim::Result<()> {
    let pol = TolerancePolicy::default();
    let ch = pauli_channel();
    println!("dim S_n, n = 1..3: {:?}", s_dims(&ch, 3, &pol)?);
    let r = primitivity_report(&ch, &IndexOptions::default(), &pol)?;
    println!("i = {:?}", r.i_index);
    println!("q in [{:?}, {:?}], exact: {}", r.q_lower, r.q_upper, r.q_exact);
    println!("case {} with bound {}", r.thm1_case.as_str(), r.thm1_bound);
    for c in &r.certificates {
        println!("  {c}");
    }
    Ok(())
}
