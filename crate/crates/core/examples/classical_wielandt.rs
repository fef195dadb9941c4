//! Classical exponents of the Wielandt digraph and its quantum embedding.

use qprim::channel::classical_embed;
use qprim::generators::wielandt_digraph;
use qprim::indices::{classical_exponent, kraus_rank_index, primitivity_index_q, wielandt_cap, QSearch};
use qprim::TolerancePolicy;

fn main() -> qprim::Result<()> {
    let pol = TolerancePolicy::default();
    for dim in 3..=6 {
        let w = wielandt_digraph(dim)?;
        let p = classical_exponent(&w)?.expect("Wielandt digraph is primitive");
        let ch = classical_embed(&w, &pol)?;
        let i = kraus_rank_index(&ch, &pol)?;
        let q = primitivity_index_q(&ch, QSearch::default(), &pol)?;
        println!(
            "D={dim}  p={p:>2} (cap {:>2})  embedded: d={} i={:?} q=[{}, {}]",
            wielandt_cap(dim),
            ch.d(),
            i,
            q.q_lower,
            q.q_upper
        );
    }
    Ok(())
}
