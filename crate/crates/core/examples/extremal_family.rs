//! The shift-plus-chord family reaches full Kraus rank only at `n = D² − D`.

use qprim::generators::shift_chord_channel;
use qprim::indices::{kraus_rank_index, q_bracket, QSearch};
use qprim::spans::s_dims;
use qprim::TolerancePolicy;

fn main() -> qprim::Result<()> {
    let pol = TolerancePolicy::default();
    for dim in 2..=6 {
        let ch = shift_chord_channel(dim)?;
        let i = kraus_rank_index(&ch, &pol)?.expect("family is primitive");
        let dims = s_dims(&ch, i, &pol)?;
        let q = q_bracket(&ch, Some(i), QSearch::default(), &pol)?;
        println!(
            "D={dim}  i={i:>2}  D^2-D={:>2}  q in [{}, {}]  dims {:?}",
            dim * dim - dim,
            q.q_lower,
            q.q_upper,
            dims
        );
    }
    Ok(())
}
