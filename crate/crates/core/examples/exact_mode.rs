//! Span dimensions over the Gaussian integers next to the floating-point
//! engine.

use qprim::generators::{pauli_channel, shift_chord_kraus};
use qprim::numerics::exact::ExactSpanEngine;
use qprim::spans::s_dims;
use qprim::{KrausChannel, TolerancePolicy};

fn main() -> qprim::Result<()> {
    let pol = TolerancePolicy::default();
    for dim in 3..=5 {
        let kraus = shift_chord_kraus(dim)?;
        let exact = ExactSpanEngine::new(&kraus)?;
        let float = s_dims(&KrausChannel::from_kraus(kraus)?, dim * dim - dim, &pol)?;
        println!("shift_chord D={dim}");
        println!("  exact {:?}  i = {:?}", exact.s_dims(dim * dim - dim), exact.kraus_rank_index());
        println!("  float {float:?}");
    }
    let p = pauli_channel();
    println!("pauli exact i = {:?}", ExactSpanEngine::new(p.kraus())?.kraus_rank_index());
    Ok(())
}
